#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <vector>

#include "ramexp/core_arith.hpp"

using namespace ramexp;

namespace {

// Naive oracles.
int naive_mu(u64 n) {
    int m = 1;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        m = -m;
    }
    return n > 1 ? -m : m;
}

i64 naive_phi(u64 n) {
    i64 c = 0;
    for (u64 k = 1; k <= n; ++k) c += std::gcd(k, n) == 1;
    return c;
}

i64 naive_dk(unsigned k, u64 n) {
    if (k == 1) return 1;
    i64 c = 0;
    for (u64 d = 1; d <= n; ++d)
        if (n % d == 0) c += naive_dk(k - 1, n / d);
    return c;
}

double naive_sigma(u64 n, double s) {
    double acc = 0;
    for (u64 d = 1; d <= n; ++d)
        if (n % d == 0) acc += std::pow(static_cast<double>(d), s);
    return acc;
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / (std::string("ramexp_test_") + name);
}

}  // namespace

TEST(SpfSieve, SmallValues) {
    const auto spf = build_spf_sieve(10);
    EXPECT_EQ(spf[9], 3u);
    EXPECT_EQ(spf[10], 2u);
    EXPECT_EQ(spf[7], 7u);
    EXPECT_TRUE(spf.is_prime(7));
    EXPECT_FALSE(spf.is_prime(9));
    EXPECT_EQ(std::vector<std::uint32_t>(spf.primes().begin(), spf.primes().end()),
              (std::vector<std::uint32_t>{2, 3, 5, 7}));
}

TEST(SpfSieve, LargestPrimeBelowMillion) {
    const auto spf = build_spf_sieve(1'000'000);
    EXPECT_EQ(spf[999983], 999983u);
    EXPECT_EQ(spf.primes().size(), 78498u);
}

TEST(SpfSieve, Errors) {
    EXPECT_THROW(build_spf_sieve(1), std::invalid_argument);
    EXPECT_THROW(build_spf_sieve(kMaxTableLimit + 1), std::length_error);
    const auto spf = build_spf_sieve(10);
    EXPECT_THROW((void)spf[11], std::out_of_range);
}

TEST(Factorize, Examples) {
    const auto spf = build_spf_sieve(1000);
    EXPECT_TRUE(factorize(1, spf).is_one());
    EXPECT_EQ(factorize(12, spf).factors(), (std::vector<PrimePower>{{2, 2}, {3, 1}}));
    EXPECT_EQ(factorize(360, spf).factors(), (std::vector<PrimePower>{{2, 3}, {3, 2}, {5, 1}}));
    EXPECT_EQ(factorize(360), factorize(360, spf));
    EXPECT_THROW(factorize(1001, spf), std::out_of_range);
    EXPECT_THROW(factorize(0, spf), std::invalid_argument);
    EXPECT_THROW(factorize(-4), std::invalid_argument);
}

TEST(Factorize, RoundTripsAgainstTrialDivision) {
    const auto spf = build_spf_sieve(5000);
    for (i64 n = 1; n <= 5000; ++n) {
        const auto f = factorize(n, spf);
        EXPECT_EQ(f.value(), static_cast<u64>(n));
        EXPECT_EQ(f, factorize(n));
    }
    const auto big = factorize(600851475143LL);
    EXPECT_EQ(big.factors(), (std::vector<PrimePower>{{71, 1}, {839, 1}, {1471, 1}, {6857, 1}}));
}

TEST(FactoredInteger, RejectsNonCanonical) {
    EXPECT_THROW(FactoredInteger({{3, 1}, {2, 1}}), std::invalid_argument);
    EXPECT_THROW(FactoredInteger({{2, 0}}), std::invalid_argument);
    EXPECT_THROW(FactoredInteger({{2, 64}}), std::overflow_error);
}

TEST(Divisors, Examples) {
    EXPECT_EQ(divisors(factorize(1)), (std::vector<u64>{1}));
    EXPECT_EQ(divisors(factorize(12)), (std::vector<u64>{1, 2, 3, 4, 6, 12}));
    EXPECT_EQ(divisors(factorize(36)).size(), 9u);
    for (i64 n = 1; n <= 300; ++n) {
        std::vector<u64> naive;
        for (u64 d = 1; d <= static_cast<u64>(n); ++d)
            if (n % d == 0) naive.push_back(d);
        EXPECT_EQ(divisors(factorize(n)), naive) << n;
    }
}

TEST(Evaluators, AgreeWithNaiveOracles) {
    for (u64 n = 1; n <= 400; ++n) {
        const auto f = factorize(static_cast<i64>(n));
        EXPECT_EQ(mobius(f), naive_mu(n)) << n;
        EXPECT_EQ(euler_phi(f), naive_phi(n)) << n;
        EXPECT_EQ(divisor_k(f, 2), naive_dk(2, n)) << n;
        EXPECT_EQ(divisor_k(f, 3), naive_dk(3, n)) << n;
        EXPECT_NEAR(sigma_real(f, 1.0), naive_sigma(n, 1.0), 1e-9);
        EXPECT_NEAR(sigma_real(f, -1.5), naive_sigma(n, -1.5), 1e-12);
    }
}

TEST(Evaluators, SigmaExamples) {
    EXPECT_EQ(sigma_real(factorize(1), 3.7), 1.0);
    EXPECT_EQ(sigma_real(factorize(2), -3.0), 1.125);
    EXPECT_NEAR(sigma_real(factorize(6), -1.0), 2.0, 1e-15);
    EXPECT_EQ(sigma_real(factorize(12), 2.0), 210.0);
}

TEST(Evaluators, Jordan) {
    EXPECT_NEAR(jordan_real(factorize(6), 2.0), 24.0, 1e-12);
    EXPECT_NEAR(jordan_real(factorize(12), 1.0), 4.0, 1e-12);
    EXPECT_NEAR(jordan_real(factorize(1), 2.5), 1.0, 1e-15);
}

TEST(BuildTable, Examples) {
    const auto mu = build_table(FnKind::mobius, 0, 10);
    EXPECT_EQ(mu.integer(6), 1);
    EXPECT_EQ(mu.integer(8), 0);
    EXPECT_EQ(build_table(FnKind::mertens, 0, 10).integer(10), -1);
    EXPECT_EQ(build_table(FnKind::divisor_k, 4, 10).integer(6), 16);
    EXPECT_NEAR(build_table(FnKind::jordan_s, 2, 10)[6], 24.0, 1e-12);
}

TEST(BuildTable, MatchesEvaluators) {
    const u64 L = 3000;
    const auto mu = build_table(FnKind::mobius, 0, L);
    const auto phi = build_table(FnKind::phi, 0, L);
    const auto d3 = build_table(FnKind::divisor_k, 3, L);
    const auto sig = build_table(FnKind::sigma_s, 0.5, L);
    const auto jor = build_table(FnKind::jordan_s, 1.5, L);
    const auto mert = build_table(FnKind::mertens, 0, L);
    i64 m = 0;
    for (u64 n = 1; n <= L; ++n) {
        const auto f = factorize(static_cast<i64>(n));
        m += mobius(f);
        ASSERT_EQ(mu.integer(n), mobius(f));
        ASSERT_EQ(phi.integer(n), euler_phi(f));
        ASSERT_EQ(d3.integer(n), divisor_k(f, 3));
        ASSERT_EQ(mert.integer(n), m);
        ASSERT_NEAR(sig[n], sigma_real(f, 0.5), 1e-10 * sig[n]);
        ASSERT_NEAR(jor[n], jordan_real(f, 1.5), 1e-10 * jor[n]);
    }
}

TEST(BuildTable, RatioTables) {
    const auto sr = build_sigma_ratio_table(1.0, 100);
    const auto jr = build_jordan_ratio_table(2.0, 100);
    for (u64 n = 1; n <= 100; ++n) {
        const auto f = factorize(static_cast<i64>(n));
        EXPECT_NEAR(sr[n], sigma_real(f, 1.0) / static_cast<double>(n), 1e-14);
        EXPECT_NEAR(jr[n], jordan_real(f, 2.0) / static_cast<double>(n * n), 1e-14);
    }
    EXPECT_EQ(sr.label(), "sigma_1(n)/n^s");
}

TEST(BuildTable, Errors) {
    EXPECT_THROW(build_table(FnKind::custom, 0, 10), std::invalid_argument);
    EXPECT_THROW(build_table(FnKind::divisor_k, 2.5, 10), std::invalid_argument);
    EXPECT_THROW(build_table(FnKind::divisor_k, 1, 10), std::invalid_argument);
    EXPECT_THROW(build_table(FnKind::mobius, 0, 0), std::invalid_argument);
    EXPECT_THROW(build_table(FnKind::mobius, 0, kMaxTableLimit + 1), std::length_error);
    EXPECT_THROW(fn_kind_from_string("bogus"), std::invalid_argument);
    EXPECT_EQ(fn_kind_from_string("divisor_k"), FnKind::divisor_k);
    const auto t = build_table(FnKind::phi, 0, 10);
    EXPECT_THROW((void)t.integer(0), std::out_of_range);
    EXPECT_THROW((void)t.at(11), std::out_of_range);
    EXPECT_THROW((void)build_table(FnKind::sigma_s, 1, 10).integer(2), std::logic_error);
}

TEST(Dirichlet, ConvolutionIdentities) {
    const u64 L = 500;
    const auto mu = build_table(FnKind::mobius, 0, L);
    const auto phi = build_table(FnKind::phi, 0, L);
    std::vector<i64> one(L + 1, 1), id(L + 1);
    std::iota(id.begin(), id.end(), 0);
    // mu * 1 = epsilon, phi * 1 = id
    const auto eps = dirichlet_convolve(mu.integers(), one);
    const auto n = dirichlet_convolve(phi.integers(), one);
    for (u64 k = 1; k <= L; ++k) {
        EXPECT_EQ(eps[k], k == 1 ? 1 : 0);
        EXPECT_EQ(n[k], id[k]);
    }
    std::vector<i64> huge(3, std::numeric_limits<i64>::max());
    EXPECT_THROW(dirichlet_convolve(huge, huge), std::overflow_error);
}

TEST(TableCache, RoundTrip) {
    const auto p = temp_file("cache.bin");
    for (const auto& t : {build_table(FnKind::divisor_k, 4, 2000), build_table(FnKind::jordan_s, 2, 2000),
                          build_table(FnKind::mertens, 0, 2000)}) {
        save_table(t, p.string());
        EXPECT_EQ(load_table(p.string()), t);
    }
    std::filesystem::remove(p);
}

TEST(TableCache, RejectsBadFiles) {
    const auto p = temp_file("bad.bin");
    {
        std::ofstream out(p, std::ios::binary);
        out << "not a table at all, just text";
    }
    EXPECT_THROW(load_table(p.string()), std::runtime_error);
    save_table(build_table(FnKind::phi, 0, 100), p.string());
    std::filesystem::resize_file(p, std::filesystem::file_size(p) - 8);
    EXPECT_THROW(load_table(p.string()), std::runtime_error);
    std::filesystem::remove(p);
    EXPECT_THROW(load_table(p.string()), std::runtime_error);
}

// Reference values from mpmath.zeta at 30 digits.
TEST(Zeta, ClosedFormsAndReference) {
    EXPECT_NEAR(zeta(2.0), std::numbers::pi * std::numbers::pi / 6, 1e-15);
    EXPECT_NEAR(zeta(4.0), std::pow(std::numbers::pi, 4) / 90, 1e-15);
    EXPECT_NEAR(zeta(1.5), 2.6123753486854883, 1e-14);
    EXPECT_NEAR(zeta(3.0), 1.2020569031595943, 1e-15);
    EXPECT_NEAR(zeta(1.1), 10.584448464950810, 1e-12);
    EXPECT_NEAR(zeta(2.5, 1e-8), 1.3414872572509172, 1e-8);
}

TEST(Zeta, DomainErrors) {
    EXPECT_THROW(zeta(1.0), std::domain_error);
    EXPECT_THROW(zeta(0.5), std::domain_error);
    EXPECT_THROW(zeta(std::nan("")), std::domain_error);
    EXPECT_THROW(zeta(2.0, 0.0), std::invalid_argument);
}
