#pragma once

/// Parseval-type convolution sums sum_{n<=N} f(n) g(n+h) for functions with
/// absolutely convergent Ramanujan expansions.
///
/// The predicted main term is N * sum_r f^(r) g^(r) w_r(h) with
/// w_r(0) = phi(r) and w_r(h) = c_r(h) for h >= 1. The remainder is
/// O(N^(1-d) log^(4-2d) N) for d < 1, O(log^3 N) for d = 1 and O(1) for
/// d > 1, where |f^(r)|, |g^(r)| << r^-(1+d). The older envelope
/// N^(2/(1+2d)) log^((5+2d)/(1+2d)) N (valid only for d > 1/2) is kept for
/// comparison.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "core_arith.hpp"
#include "expansions.hpp"
#include "ramanujan.hpp"
#include "summation.hpp"

namespace ramexp {

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Lean sieves for long weight vectors
// ---------------------------------------------------------------------------

inline std::vector<std::int8_t> mobius_sieve(u64 limit) {
    detail::check_table_limit(limit, "mobius_sieve");
    std::vector<std::int8_t> mu(limit + 1, 0);
    std::vector<bool> composite(limit + 1, false);
    std::vector<std::uint32_t> primes;
    if (limit >= 1) mu[1] = 1;
    for (u64 i = 2; i <= limit; ++i) {
        if (!composite[i]) {
            primes.push_back(static_cast<std::uint32_t>(i));
            mu[i] = -1;
        }
        for (std::uint32_t p : primes) {
            const u64 n = p * i;
            if (n > limit) break;
            composite[n] = true;
            if (i % p == 0) {
                mu[n] = 0;
                break;
            }
            mu[n] = static_cast<std::int8_t>(-mu[i]);
        }
    }
    return mu;
}

inline std::vector<std::uint32_t> phi_sieve(u64 limit) {
    detail::check_table_limit(limit, "phi_sieve");
    std::vector<std::uint32_t> phi(limit + 1, 0);
    std::vector<std::uint32_t> primes;
    if (limit >= 1) phi[1] = 1;
    for (u64 i = 2; i <= limit; ++i) {
        if (phi[i] == 0) {
            primes.push_back(static_cast<std::uint32_t>(i));
            phi[i] = static_cast<std::uint32_t>(i - 1);
        }
        for (std::uint32_t p : primes) {
            const u64 n = p * i;
            if (n > limit) break;
            if (i % p == 0) {
                phi[n] = phi[i] * p;
                break;
            }
            phi[n] = phi[i] * (p - 1);
        }
    }
    return phi;
}

/// w_r(h) for r = 0..R: phi(r) when h = 0, c_r(h) otherwise.
inline std::vector<double> parseval_weights(u64 h, u64 R) {
    std::vector<double> w(R + 1, 0.0);
    if (h == 0) {
        const auto phi = phi_sieve(R);
        for (u64 r = 1; r <= R; ++r) w[r] = phi[r];
        return w;
    }
    // c_r(h) = sum over d | gcd(r, h) of d mu(r/d)
    const auto mu = mobius_sieve(R);
    for (u64 d : divisors(factorize(static_cast<i64>(h)))) {
        if (d > R) break;
        for (u64 k = 1; k * d <= R; ++k)
            if (mu[k] != 0) w[k * d] += static_cast<double>(mu[k]) * static_cast<double>(d);
    }
    return w;
}

// ---------------------------------------------------------------------------
// Main terms
// ---------------------------------------------------------------------------

struct MainTerm {
    double value = 0.0;
    u64 R = 1;
    double tail = 0.0;
    bool cap_reached = false;
};

/// sum over r <= R of f^(r) g^(r) w_r(h), with R chosen so the certified
/// tail is <= target.
inline MainTerm main_term(const CoefficientSeries& f, const CoefficientSeries& g, u64 h, double target) {
    const Truncation tr = choose_truncation(f, g, h, target);
    std::vector<double> prod = f.batch(tr.R);
    {
        const std::vector<double> cg = g.batch(tr.R);
        for (u64 r = 1; r <= tr.R; ++r) prod[r] *= cg[r];
    }
    const std::vector<double> w = parseval_weights(h, tr.R);
    NeumaierSum sum;
    for (u64 r = 1; r <= tr.R; ++r)
        if (prod[r] != 0.0 && w[r] != 0.0) sum.add(prod[r] * w[r]);
    return {sum.value(), tr.R, tr.tail, tr.cap_reached};
}

/// zeta(s+1) zeta(t+1) / zeta(s+t+2) * sigma_{-(s+t+1)}(h).
inline double corollary1_constant(double s, double t, u64 h, double tol = 1e-15) {
    if (!(s > 0) || !(t > 0)) throw std::invalid_argument("corollary1_constant: s, t must be positive");
    if (h == 0) throw std::invalid_argument("corollary1_constant: h must be positive");
    return zeta(s + 1, tol) * zeta(t + 1, tol) / zeta(s + t + 2, tol) *
           sigma_real(factorize(static_cast<i64>(h)), -(s + t + 1));
}

/// h = 0 analogue for the sigma pair:
/// zeta(s+1) zeta(t+1) sum_r phi(r) r^-(s+t+2) = zeta(s+1) zeta(t+1) zeta(s+t+1) / zeta(s+t+2).
inline double sigma_pair_diagonal_constant(double s, double t, double tol = 1e-15) {
    if (!(s > 0) || !(t > 0)) throw std::invalid_argument("sigma_pair_diagonal_constant: s, t must be positive");
    return zeta(s + 1, tol) * zeta(t + 1, tol) * zeta(s + t + 1, tol) / zeta(s + t + 2, tol);
}

/// Which Euler factor to use for primes not dividing h.
enum class DeltaForm {
    symmetric,   ///< (1 - p^-(s+1)) (1 - p^-(t+1)) - p^-(s+t+2)
    as_printed,  ///< (1 - p^-(s+1)) (1 - p^-(s+1)) - p^-(s+t+2)
};

namespace detail {
inline double delta_factor(u64 p, double s, double t, bool divides_h, DeltaForm form) {
    const double pd = static_cast<double>(p);
    const double a = std::pow(pd, -(s + 1));
    const double b = form == DeltaForm::symmetric ? std::pow(pd, -(t + 1)) : a;
    const double c = std::pow(pd, -(s + t + 2));
    return divides_h ? (1 - a) * (1 - b) + (pd - 1) * c : (1 - a) * (1 - b) - c;
}
}  // namespace detail

/// Literal Euler product over primes p <= P (both the p | h and p not| h
/// factors). No tail correction; used as an independent cross-check.
inline double delta_constant_partial(double s, double t, u64 h, u64 P, DeltaForm form = DeltaForm::symmetric) {
    if (!(s > 0) || !(t > 0)) throw std::invalid_argument("delta_constant: s, t must be positive");
    if (h == 0) throw std::invalid_argument("delta_constant: h must be positive");
    const SpfTable sieve(std::max<u64>(P, 2));
    NeumaierSum log_prod;
    for (u64 p : sieve.primes()) {
        if (p > P) break;
        log_prod.add(std::log(detail::delta_factor(p, s, t, h % p == 0, form)));
    }
    return std::exp(log_prod.value());
}

/// Delta(h) = prod_{p | h} [(1-p^-(s+1))(1-p^-(t+1)) + (p-1) p^-(s+t+2)]
///          * prod_{p not| h} [(1-p^-(s+1))(1-p^-(t+1)) - p^-(s+t+2)].
///
/// The factors (1-p^-(s+1))(1-p^-(t+1)) are pulled out as
/// 1/(zeta(s+1) zeta(t+1)); what remains differs from 1 by O(p^-(s+t+2)) so
/// the product is truncated at the first P whose log-tail bound
/// 8 P^-(s+t+1) / (s+t+1) is below tol/2.
inline double delta_constant(double s, double t, u64 h, double tol = 1e-12) {
    if (!(s > 0) || !(t > 0)) throw std::invalid_argument("delta_constant: s, t must be positive");
    if (h == 0) throw std::invalid_argument("delta_constant: h must be positive");
    if (!(tol > 0)) throw std::invalid_argument("delta_constant: tol must be positive");
    const double e = s + t + 1;
    const double P_real = std::pow(16.0 / (e * tol), 1.0 / e);
    const u64 P = static_cast<u64>(std::clamp(std::ceil(P_real), 3.0, 1e7));
    const auto h_factors = factorize(static_cast<i64>(h));
    auto reduced = [&](u64 p, bool divides_h) {
        const double pd = static_cast<double>(p);
        const double a = std::pow(pd, -(s + 1));
        const double b = std::pow(pd, -(t + 1));
        const double y = a * b / ((1 - a) * (1 - b));
        return divides_h ? std::log1p((pd - 1) * y) : std::log1p(-y);
    };
    NeumaierSum log_prod;
    for (const auto& pp : h_factors.factors()) log_prod.add(reduced(pp.prime, true));
    const SpfTable sieve(P);
    for (u64 p : sieve.primes())
        if (h % p != 0) log_prod.add(reduced(p, false));
    const double z = zeta(s + 1, tol / 8) * zeta(t + 1, tol / 8);
    return std::exp(log_prod.value()) / z;
}

// ---------------------------------------------------------------------------
// Error envelopes
// ---------------------------------------------------------------------------

/// Shape of the improved remainder: N^(1-d) log^(4-2d) N, log^3 N or 1.
inline double error_shape_new(double N, double delta) {
    if (!(N >= 2)) throw std::invalid_argument("error_bound_new: N must be >= 2");
    if (!(delta > 0)) throw std::invalid_argument("error_bound_new: delta must be positive");
    const double L = std::log(N);
    if (delta < 1) return std::pow(N, 1 - delta) * std::pow(L, 4 - 2 * delta);
    if (delta == 1) return L * L * L;
    return 1.0;
}

inline double error_bound_new(double N, double delta, double scale) {
    if (!(scale > 0)) throw std::invalid_argument("error_bound_new: scale must be positive");
    return scale * error_shape_new(N, delta);
}

/// Shape of the earlier remainder N^(2/(1+2d)) log^((5+2d)/(1+2d)) N, d > 1/2.
inline double error_shape_old(double N, double delta) {
    if (!(N >= 2)) throw std::invalid_argument("error_bound_old: N must be >= 2");
    if (!(delta > 0.5)) throw std::domain_error("error_bound_old: requires delta > 1/2");
    const double q = 1 + 2 * delta;
    return std::pow(N, 2 / q) * std::pow(std::log(N), (5 + 2 * delta) / q);
}

inline double error_bound_old(double N, double delta, double scale) {
    if (!(scale > 0)) throw std::invalid_argument("error_bound_old: scale must be positive");
    return scale * error_shape_old(N, delta);
}

// ---------------------------------------------------------------------------
// Brute-force convolution
// ---------------------------------------------------------------------------

/// sum over 1 <= n <= N of f(n) g(n+h).
///
/// The range is cut into `chunks` fixed pieces, each summed exactly and
/// merged exactly, so the result is bit-identical for any chunk or thread
/// count.
inline double brute_force_convolution(const FnTable& f, const FnTable& g, u64 N, u64 h, unsigned chunks = 1,
                                      unsigned threads = 1) {
    if (N < 1) throw std::invalid_argument("brute_force_convolution: N must be >= 1");
    if (f.limit() < N) throw std::out_of_range("brute_force_convolution: f table shorter than N");
    if (g.limit() < N + h) throw std::out_of_range("brute_force_convolution: g table shorter than N + h");
    chunks = std::max(1u, chunks);
    threads = std::clamp(threads, 1u, chunks);
    std::vector<ExactAccumulator> partial(chunks);
    auto run_chunk = [&](unsigned c) {
        const u64 lo = 1 + N * c / chunks;
        const u64 hi = N * (c + 1) / chunks;
        ExactAccumulator acc;
        for (u64 n = lo; n <= hi; ++n) acc.add(f[n] * g[n + h]);
        partial[c] = acc;
    };
    if (threads == 1) {
        for (unsigned c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (unsigned c = w; c < chunks; c += threads) run_chunk(c);
            });
    }
    ExactAccumulator total;
    for (const auto& p : partial) total.merge(p);
    return total.value();
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct ConvolutionReport {
    u64 N = 0;
    u64 h = 0;
    double s = 0;
    double t = 0;
    double actual = 0;
    double main = 0;
    double signed_error = 0;
    double bound_new = 0;
    double bound_old = 0;  // NaN when delta <= 1/2
    u64 R = 1;
    double tail = 0;
    bool cap_reached = false;

    [[nodiscard]] double relative_error() const { return signed_error / main; }
};

enum class PairKind { sigma, jordan, custom };

struct SeriesPair {
    CoefficientSeries f;
    CoefficientSeries g;
};
enum class OutputFormat { csv, json };

/// Growth gate slack for the normalized error across the grid.
inline constexpr double kScaleGrowthSlack = 1.10;
inline constexpr u64 kMaxExperimentN = 100'000'000;

struct ExperimentConfig {
    PairKind pair = PairKind::sigma;
    double s = 1.0;
    double t = 1.0;
    u64 h = 0;
    std::vector<u64> grid;
    double tail_target = 0.0;  // <= 0 selects the automatic per-grid target
    std::string output;
    OutputFormat format = OutputFormat::csv;
    unsigned threads = 1;
    unsigned chunks = 64;
    std::string custom_file;               // source of custom_pair, for the report header
    std::optional<SeriesPair> custom_pair;  // required when pair == custom
    u64 max_N = kMaxExperimentN;
};

struct CrossCheck {
    std::string kind;  // "corollary1_constant", "delta_constant" or "diagonal_closed_form"
    double value = 0;
    double difference = 0;
    double tolerance = 0;
    bool ok = true;
};

struct ExperimentResult {
    std::string label_f;
    std::string label_g;
    double delta = 0;
    double decay_C_f = 0;
    double decay_C_g = 0;
    MainTerm main;
    double tail_target = 0;
    std::vector<ConvolutionReport> reports;
    double scale_new = 0;  // max over the grid of |error| / new shape
    double scale_old = 0;  // same for the old shape; 0 when delta <= 1/2
    bool growth_ok = true;
    std::optional<CrossCheck> cross_check;

    [[nodiscard]] bool passed() const { return growth_ok && (!cross_check || cross_check->ok); }
};

/// Default series-tail target for an N grid: 1e-6 of the unit-scale error
/// envelope per unit N at the largest grid point, floored at 1e-14.
inline double default_tail_target(const std::vector<u64>& grid, double delta) {
    double target = 1e-3;
    for (u64 N : grid) {
        const double Nd = std::max<double>(static_cast<double>(N), 2.0);
        target = std::min(target, 1e-6 * error_shape_new(Nd, delta) / Nd);
    }
    return std::max(target, 1e-14);
}

/// Normalized-error growth check: every point stays within the slack of
/// the running max of the earlier points.
inline bool normalized_growth_ok(const std::vector<double>& normalized, double slack = kScaleGrowthSlack) {
    double running = -1.0;
    for (double e : normalized) {
        if (running >= 0 && e > slack * running) return false;
        running = std::max(running, e);
    }
    return true;
}

namespace detail {
/// Values of a finitely supported expansion on 1..limit via periodic rows.
inline FnTable finite_expansion_table(const CoefficientSeries& f, u64 K, u64 limit, const std::string& label) {
    const RamanujanTables tables(std::max<u64>(K, 1));
    const auto coeffs = f.batch(K);
    std::vector<double> v(limit + 1, 0.0);
    std::vector<NeumaierSum> acc(limit + 1);
    for (u64 r = 1; r <= K; ++r) {
        if (coeffs[r] == 0.0) continue;
        const auto row = ramanujan_row(r, tables);
        for (u64 n = 1; n <= limit; ++n) acc[n].add(coeffs[r] * static_cast<double>(row(n)));
    }
    for (u64 n = 1; n <= limit; ++n) v[n] = acc[n].value();
    return FnTable::custom(std::move(v), label);
}

inline u64 support_size(const CoefficientSeries& f, u64 probe) {
    const auto v = f.batch(probe);
    u64 K = 0;
    for (u64 r = 1; r <= probe; ++r)
        if (v[r] != 0.0) K = r;
    return K;
}
}  // namespace detail

inline constexpr u64 kMaxCustomSupport = 4096;

/// Runs the convolution experiment over the N grid: builds the function
/// tables once at max N + h, evaluates the main-term series once, and emits
/// one report per grid point in grid order.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.pair != PairKind::custom && (!(cfg.s > 0) || !(cfg.t > 0)))
        throw std::invalid_argument("run_experiment: s and t must be positive");
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
        if (cfg.grid[i] < 2) throw std::invalid_argument("run_experiment: grid values must be >= 2");
        if (i > 0 && cfg.grid[i] <= cfg.grid[i - 1])
            throw std::invalid_argument("run_experiment: grid must be strictly increasing");
    }
    if (!cfg.grid.empty() && cfg.grid.back() > cfg.max_N)
        throw std::length_error("run_experiment: grid exceeds the maximum N of " + std::to_string(cfg.max_N));

    SeriesPair series = [&]() -> SeriesPair {
        switch (cfg.pair) {
            case PairKind::sigma: return {sigma_series(cfg.s), sigma_series(cfg.t)};
            case PairKind::jordan: return {jordan_series(cfg.s), jordan_series(cfg.t)};
            case PairKind::custom:
                if (!cfg.custom_pair) throw std::invalid_argument("run_experiment: custom pair not loaded");
                return *cfg.custom_pair;
        }
        throw std::invalid_argument("run_experiment: unknown pair");
    }();

    ExperimentResult res;
    res.label_f = series.f.label;
    res.label_g = series.g.label;
    res.delta = std::min(series.f.decay_delta, series.g.decay_delta);
    res.decay_C_f = series.f.decay_C;
    res.decay_C_g = series.g.decay_C;
    if (cfg.grid.empty()) return res;

    res.tail_target = cfg.tail_target > 0 ? cfg.tail_target : default_tail_target(cfg.grid, res.delta);
    res.main = main_term(series.f, series.g, cfg.h, res.tail_target);

    const u64 limit = cfg.grid.back() + cfg.h;
    const bool same = cfg.pair != PairKind::custom && cfg.s == cfg.t;
    auto make_table = [&](const CoefficientSeries& c, double param) {
        switch (cfg.pair) {
            case PairKind::sigma: return build_sigma_ratio_table(param, limit);
            case PairKind::jordan: return build_jordan_ratio_table(param, limit);
            case PairKind::custom: {
                const u64 K = detail::support_size(c, kMaxCustomSupport);
                return detail::finite_expansion_table(c, std::max<u64>(K, 1), limit, c.label);
            }
        }
        throw std::invalid_argument("run_experiment: unknown pair");
    };
    const FnTable tf = make_table(series.f, cfg.s);
    const std::optional<FnTable> tg_own = same ? std::nullopt : std::optional<FnTable>(make_table(series.g, cfg.t));
    const FnTable& tg = same ? tf : *tg_own;

    const bool has_old = res.delta > 0.5;
    std::vector<double> norm_new;
    for (u64 N : cfg.grid) {
        ConvolutionReport rep;
        rep.N = N;
        rep.h = cfg.h;
        rep.s = cfg.pair == PairKind::custom ? series.f.decay_delta : cfg.s;
        rep.t = cfg.pair == PairKind::custom ? series.g.decay_delta : cfg.t;
        rep.actual = brute_force_convolution(tf, tg, N, cfg.h, cfg.chunks, cfg.threads);
        rep.main = static_cast<double>(N) * res.main.value;
        rep.signed_error = rep.actual - rep.main;
        rep.R = res.main.R;
        rep.tail = res.main.tail;
        rep.cap_reached = res.main.cap_reached;
        const double Nd = static_cast<double>(N);
        norm_new.push_back(std::abs(rep.signed_error) / error_shape_new(Nd, res.delta));
        res.scale_new = std::max(res.scale_new, norm_new.back());
        if (has_old) res.scale_old = std::max(res.scale_old, std::abs(rep.signed_error) / error_shape_old(Nd, res.delta));
        res.reports.push_back(rep);
    }
    for (auto& rep : res.reports) {
        const double Nd = static_cast<double>(rep.N);
        rep.bound_new = res.scale_new * error_shape_new(Nd, res.delta);
        rep.bound_old = has_old ? res.scale_old * error_shape_old(Nd, res.delta) : std::nan("");
    }
    res.growth_ok = normalized_growth_ok(norm_new);

    const double series_tol = res.main.tail + 1e-12;
    if (cfg.pair == PairKind::sigma) {
        CrossCheck cc;
        if (cfg.h >= 1) {
            cc.kind = "corollary1_constant";
            cc.value = corollary1_constant(cfg.s, cfg.t, cfg.h);
        } else {
            cc.kind = "diagonal_closed_form";
            cc.value = sigma_pair_diagonal_constant(cfg.s, cfg.t);
        }
        cc.difference = res.main.value - cc.value;
        cc.tolerance = series_tol;
        cc.ok = std::abs(cc.difference) <= cc.tolerance;
        res.cross_check = cc;
    } else if (cfg.pair == PairKind::jordan && cfg.h >= 1) {
        CrossCheck cc;
        cc.kind = "delta_constant";
        cc.value = delta_constant(cfg.s, cfg.t, cfg.h, 1e-12);
        cc.difference = res.main.value - cc.value;
        cc.tolerance = std::max(1e-6, series_tol);
        cc.ok = std::abs(cc.difference) <= cc.tolerance;
        res.cross_check = cc;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Exponent fitting
// ---------------------------------------------------------------------------

struct ExponentFit {
    std::vector<std::pair<double, double>> points;  // (log N, log |error|)
    double slope = 0;
    double intercept = 0;
    double max_residual = 0;
    std::size_t dropped = 0;
};

/// Relative size below which an error counts as zero for fitting.
inline constexpr double kZeroErrorThreshold = 1e-9;

/// Least-squares slope of log |signed_error| against log N.
inline ExponentFit fit_exponent(const std::vector<ConvolutionReport>& reports) {
    ExponentFit fit;
    for (const auto& r : reports) {
        const double e = std::abs(r.signed_error);
        if (e == 0.0 || e < kZeroErrorThreshold * std::abs(r.actual)) {
            ++fit.dropped;
            continue;
        }
        fit.points.emplace_back(std::log(static_cast<double>(r.N)), std::log(e));
    }
    const auto m = static_cast<double>(fit.points.size());
    if (fit.points.size() < 3)
        throw InsufficientData("fit_exponent: need at least 3 nonzero errors, have " + std::to_string(fit.points.size()));
    double sx = 0, sy = 0;
    for (const auto& [x, y] : fit.points) {
        sx += x;
        sy += y;
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : fit.points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0) throw InsufficientData("fit_exponent: all points share one N");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (const auto& [x, y] : fit.points)
        fit.max_residual = std::max(fit.max_residual, std::abs(y - (fit.intercept + fit.slope * x)));
    return fit;
}

}  // namespace ramexp
