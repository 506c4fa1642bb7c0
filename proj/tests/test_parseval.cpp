#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ramexp/parseval.hpp"

using namespace ramexp;

namespace {

ConvolutionReport synthetic(u64 N, double err) {
    ConvolutionReport r;
    r.N = N;
    r.actual = static_cast<double>(N);
    r.signed_error = err;
    return r;
}

CoefficientSeries indicator_one() { return finite_series({1.0}, 1.0, "indicator"); }

}  // namespace

TEST(Weights, MatchRamanujanSums) {
    const RamanujanTables t(500);
    for (u64 h : {0, 1, 2, 6, 12, 35}) {
        const auto w = parseval_weights(h, 500);
        for (u64 r = 1; r <= 500; ++r)
            ASSERT_EQ(w[r], static_cast<double>(h == 0 ? t.phi(r) : ramanujan_sum_holder(r, h, t))) << r << ' ' << h;
    }
}

TEST(Sieves, LeanSievesMatchTables) {
    const auto mu = mobius_sieve(5000);
    const auto phi = phi_sieve(5000);
    const auto mt = build_table(FnKind::mobius, 0, 5000);
    const auto pt = build_table(FnKind::phi, 0, 5000);
    for (u64 n = 1; n <= 5000; ++n) {
        ASSERT_EQ(mu[n], mt.integer(n));
        ASSERT_EQ(static_cast<i64>(phi[n]), pt.integer(n));
    }
}

TEST(MainTerm, SigmaPairDiagonal) {
    const auto f = sigma_series(1.0);
    const auto m = main_term(f, f, 0, 1e-10);
    EXPECT_FALSE(m.cap_reached);
    EXPECT_LE(m.tail, 1e-10);
    const double expected = 2.5 * zeta(3.0);
    EXPECT_NEAR(m.value, expected, m.tail + 1e-12);
    EXPECT_NEAR(m.value, 3.005142, 1e-6);
    EXPECT_NEAR(sigma_pair_diagonal_constant(1, 1), expected, 1e-14);
}

TEST(MainTerm, SigmaPairShifted) {
    const auto f = sigma_series(1.0);
    const auto m = main_term(f, f, 2, 1e-10);
    EXPECT_NEAR(m.value, 2.8125, m.tail + 1e-12);
    for (double s : {0.75, 1.5})
        for (u64 h : {1, 3, 12}) {
            const auto fs = sigma_series(s);
            const auto mh = main_term(fs, fs, h, 1e-9);
            EXPECT_NEAR(mh.value, corollary1_constant(s, s, h), mh.tail + 1e-12) << s << ' ' << h;
        }
}

TEST(MainTerm, IndicatorSeries) {
    const auto e = indicator_one();
    for (u64 h : {0, 1, 7, 30}) EXPECT_DOUBLE_EQ(main_term(e, e, h, 1e-3).value, 1.0);
}

TEST(ShiftedSigmaConstant, Examples) {
    EXPECT_NEAR(corollary1_constant(1, 1, 1), 2.5, 1e-14);
    EXPECT_NEAR(corollary1_constant(1, 1, 2), 2.8125, 1e-14);
    const double z15 = 2.6123753486854883, z3 = 1.2020569031595943;
    EXPECT_NEAR(corollary1_constant(0.5, 0.5, 1), z15 * z15 / z3, 1e-12);
    EXPECT_NEAR(corollary1_constant(0.5, 0.5, 1), 5.6774, 1e-4);
    EXPECT_THROW(corollary1_constant(1, 1, 0), std::invalid_argument);
    EXPECT_THROW(corollary1_constant(0, 1, 1), std::invalid_argument);
}

TEST(DeltaConstant, PrimeFactorAtTwo) {
    EXPECT_NEAR(detail::delta_factor(2, 1, 1, true, DeltaForm::symmetric), 0.625, 1e-15);
    EXPECT_NEAR(detail::delta_factor(3, 1, 1, false, DeltaForm::symmetric), (8.0 / 9) * (8.0 / 9) - 1.0 / 81, 1e-15);
}

TEST(DeltaConstant, LargeExponentLimit) {
    EXPECT_NEAR(delta_constant(40, 40, 1), 1.0, 1e-11);
    EXPECT_NEAR(delta_constant(40, 40, 6), 1.0, 1e-11);
}

TEST(DeltaConstant, AgreesWithLiteralProduct) {
    // The literal product stops at P = 10^6; its relative tail is about
    // 2 sum_{p > P} p^-(1+m), m = min(s, t).
    const u64 P = 1'000'000;
    for (auto [s, t] : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}, std::pair{0.5, 1.5}})
        for (u64 h : {1, 2, 6}) {
            const double m = std::min(s, t);
            const double tail = 2 * std::pow(static_cast<double>(P), -m) / (m * std::log(static_cast<double>(P)));
            const double exact = delta_constant(s, t, h);
            const double partial = delta_constant_partial(s, t, h, P);
            EXPECT_NEAR(exact, partial, tail * exact) << s << ' ' << t << ' ' << h;
            EXPECT_GT(std::abs(exact - partial), 0.0);
        }
}

TEST(DeltaConstant, MatchesJordanMainTerm) {
    for (auto [s, t] : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}})
        for (u64 h : {1, 2, 6}) {
            const auto m = main_term(jordan_series(s), jordan_series(t), h, 1e-10);
            EXPECT_NEAR(m.value, delta_constant(s, t, h, 1e-8), 1e-6) << s << ' ' << t << ' ' << h;
            EXPECT_NEAR(m.value, delta_constant(s, t, h), 1e-9) << s << ' ' << t << ' ' << h;
        }
}

TEST(DeltaConstant, PrintedFormCoincidesOnlyWhenSEqualsT) {
    EXPECT_NEAR(delta_constant_partial(1, 1, 1, 10'000, DeltaForm::as_printed),
                delta_constant_partial(1, 1, 1, 10'000, DeltaForm::symmetric), 1e-15);
    EXPECT_GT(std::abs(delta_constant_partial(2, 1, 1, 10'000, DeltaForm::as_printed) -
                       delta_constant_partial(2, 1, 1, 10'000, DeltaForm::symmetric)),
              0.1);
}

TEST(DeltaConstant, Errors) {
    EXPECT_THROW(delta_constant(1, 1, 0), std::invalid_argument);
    EXPECT_THROW(delta_constant(0, 1, 1), std::invalid_argument);
    EXPECT_THROW(delta_constant(1, 1, 1, 0.0), std::invalid_argument);
}

TEST(ErrorBounds, NewShape) {
    EXPECT_NEAR(error_bound_new(std::exp(3.0), 1.0, 1.0), 27.0, 1e-12);
    const double L = std::log(1e4);
    EXPECT_NEAR(error_bound_new(1e4, 0.5, 1.0), 100 * L * L * L, 1e-8);
    EXPECT_NEAR(error_bound_new(1e4, 0.5, 1.0), 78'135, 10);
    EXPECT_EQ(error_bound_new(1e9, 2.0, 7.0), 7.0);
    EXPECT_THROW(error_bound_new(1e4, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(error_bound_new(1.0, 0.5, 1.0), std::invalid_argument);
    EXPECT_THROW(error_bound_new(1e4, 0.5, 0.0), std::invalid_argument);
}

TEST(ErrorBounds, OldShape) {
    const double L = std::log(1e6);
    EXPECT_NEAR(error_bound_old(1e6, 1.0, 2.0), 2 * 1e4 * std::pow(L, 7.0 / 3.0), 1e-6);
    EXPECT_NEAR(error_bound_old(1e6, 1.5, 1.0), 1e3 * L * L, 1e-8);
    EXPECT_THROW(error_bound_old(1e6, 0.5, 1.0), std::domain_error);
    EXPECT_THROW(error_bound_old(1e6, 0.3, 1.0), std::domain_error);
}

TEST(ErrorBounds, NewBeatsOldAsNGrows) {
    for (double d : {0.6, 0.75, 0.9}) {
        const double r4 = error_bound_new(1e4, d, 1) / error_bound_old(1e4, d, 1);
        const double r6 = error_bound_new(1e6, d, 1) / error_bound_old(1e6, d, 1);
        const double r9 = error_bound_new(1e9, d, 1) / error_bound_old(1e9, d, 1);
        EXPECT_LT(r6, r4) << d;
        EXPECT_LT(r9, r6) << d;
    }
}

TEST(BruteForce, Examples) {
    const auto one = FnTable::custom(std::vector<double>(20, 1.0));
    EXPECT_EQ(brute_force_convolution(one, one, 10, 0), 10.0);
    const auto f = build_sigma_ratio_table(1.0, 10);
    EXPECT_NEAR(brute_force_convolution(f, f, 3, 0), 1 + 2.25 + 16.0 / 9, 1e-14);
    EXPECT_THROW(brute_force_convolution(f, f, 11, 0), std::out_of_range);
    EXPECT_THROW(brute_force_convolution(f, f, 9, 2), std::out_of_range);
    EXPECT_THROW(brute_force_convolution(f, f, 0, 0), std::invalid_argument);
}

TEST(BruteForce, ChunkAndThreadInvariant) {
    const auto f = build_sigma_ratio_table(0.5, 200'002);
    const double ref = brute_force_convolution(f, f, 200'000, 2, 1, 1);
    for (unsigned chunks : {1u, 3u, 64u, 1000u})
        for (unsigned threads : {1u, 4u, 64u})
            EXPECT_EQ(brute_force_convolution(f, f, 200'000, 2, chunks, threads), ref) << chunks << ' ' << threads;
}

TEST(BruteForce, ApproachesMainTerm) {
    const u64 N = 1'000'000;
    const auto f = build_sigma_ratio_table(1.0, N);
    const double actual = brute_force_convolution(f, f, N, 0, 8, 1);
    const double main = 2.5 * zeta(3.0) * static_cast<double>(N);
    EXPECT_LT(std::abs(actual - main), error_bound_new(static_cast<double>(N), 1.0, 1.0));
}

TEST(Experiment, EmptyGrid) {
    ExperimentConfig cfg;
    const auto res = run_experiment(cfg);
    EXPECT_TRUE(res.reports.empty());
    EXPECT_TRUE(res.passed());
}

TEST(Experiment, SigmaDiagonalSmallGrid) {
    ExperimentConfig cfg;
    cfg.grid = {1000, 10'000, 100'000};
    const auto res = run_experiment(cfg);
    ASSERT_EQ(res.reports.size(), 3u);
    for (const auto& r : res.reports) {
        EXPECT_NEAR(r.main / static_cast<double>(r.N), 3.005142, 1e-6);
        EXPECT_EQ(r.signed_error, r.actual - r.main);
        EXPECT_LE(std::abs(r.signed_error), r.bound_new * (1 + 1e-12));
        EXPECT_LE(std::abs(r.signed_error), r.bound_old * (1 + 1e-12));
    }
    ASSERT_TRUE(res.cross_check.has_value());
    EXPECT_EQ(res.cross_check->kind, "diagonal_closed_form");
    EXPECT_TRUE(res.cross_check->ok);
    EXPECT_TRUE(res.passed());
}

TEST(Experiment, SigmaShiftedRelativeError) {
    ExperimentConfig cfg;
    cfg.h = 2;
    cfg.grid = {10'000, 100'000, 1'000'000};
    const auto res = run_experiment(cfg);
    EXPECT_LE(std::abs(res.reports.back().relative_error()), 0.01);
    EXPECT_EQ(res.cross_check->kind, "corollary1_constant");
    EXPECT_TRUE(res.passed());
}

TEST(Experiment, JordanCrossCheck) {
    ExperimentConfig cfg;
    cfg.pair = PairKind::jordan;
    cfg.h = 1;
    cfg.grid = {1000, 10'000, 100'000};
    const auto res = run_experiment(cfg);
    ASSERT_TRUE(res.cross_check.has_value());
    EXPECT_EQ(res.cross_check->kind, "delta_constant");
    EXPECT_TRUE(res.cross_check->ok);
    EXPECT_FALSE(std::isnan(res.reports[0].bound_old));
}

TEST(Experiment, CustomIndicatorPairIsExact) {
    ExperimentConfig cfg;
    cfg.pair = PairKind::custom;
    cfg.grid = {100, 1000, 10'000};
    EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
    cfg.custom_pair = SeriesPair{indicator_one(), indicator_one()};
    const auto res = run_experiment(cfg);
    for (const auto& r : res.reports) {
        EXPECT_EQ(r.actual, static_cast<double>(r.N));
        EXPECT_EQ(r.signed_error, 0.0);
    }
    EXPECT_FALSE(res.cross_check.has_value());
    EXPECT_TRUE(res.passed());
}

TEST(Experiment, CustomPairMatchesDirectExpansion) {
    // f = c_1 + 0.5 c_2, g = c_1 - 0.25 c_3 share only r = 1, so the main term is 1
    ExperimentConfig cfg;
    cfg.pair = PairKind::custom;
    cfg.h = 1;
    cfg.grid = {600, 6000, 60'000};
    cfg.custom_pair = SeriesPair{finite_series({1.0, 0.5}, 1.0, "f"), finite_series({1.0, 0.0, -0.25}, 1.0, "g")};
    const auto res = run_experiment(cfg);
    EXPECT_DOUBLE_EQ(res.main.value, 1.0);
    // over whole periods of lcm(2, 3) = 6 the sum is exactly N
    for (const auto& r : res.reports) EXPECT_NEAR(r.actual, static_cast<double>(r.N), 1e-9);
}

TEST(Experiment, ValidatesConfig) {
    ExperimentConfig cfg;
    cfg.grid = {1000, 1000};
    EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
    cfg.grid = {1};
    EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
    cfg.grid = {1000, 20'000};
    cfg.max_N = 10'000;
    EXPECT_THROW(run_experiment(cfg), std::length_error);
    cfg.max_N = kMaxExperimentN;
    cfg.s = 0;
    EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
}

TEST(Experiment, DeterministicAcrossThreads) {
    ExperimentConfig cfg;
    cfg.h = 2;
    cfg.grid = {10'000, 100'000};
    const auto a = run_experiment(cfg);
    cfg.threads = 64;
    const auto b = run_experiment(cfg);
    for (std::size_t i = 0; i < a.reports.size(); ++i) EXPECT_EQ(a.reports[i].actual, b.reports[i].actual);
}

TEST(GrowthGate, RunningMax) {
    EXPECT_TRUE(normalized_growth_ok({1.0, 1.05, 0.5, 1.1}));
    EXPECT_FALSE(normalized_growth_ok({1.0, 1.2}));
    EXPECT_TRUE(normalized_growth_ok({}));
    EXPECT_TRUE(normalized_growth_ok({0.0, 0.0}));
}

TEST(FitExponent, PowerLaw) {
    const auto fit = fit_exponent({synthetic(1000, std::sqrt(1e3)), synthetic(10'000, -std::sqrt(1e4)),
                                   synthetic(100'000, std::sqrt(1e5))});
    EXPECT_NEAR(fit.slope, 0.5, 1e-12);
    EXPECT_NEAR(fit.max_residual, 0.0, 1e-12);
    EXPECT_EQ(fit.dropped, 0u);
}

TEST(FitExponent, Constant) {
    const auto fit = fit_exponent({synthetic(1000, 7), synthetic(10'000, 7), synthetic(100'000, 7)});
    EXPECT_NEAR(fit.slope, 0.0, 1e-12);
    EXPECT_NEAR(fit.intercept, std::log(7.0), 1e-12);
}

TEST(FitExponent, InsufficientData) {
    EXPECT_THROW(fit_exponent({synthetic(1000, 1), synthetic(10'000, 2)}), InsufficientData);
    EXPECT_THROW(fit_exponent({synthetic(1000, 1), synthetic(10'000, 0), synthetic(100'000, 3)}), InsufficientData);
}
