#pragma once

// Ramanujan-coefficient series with a certified decay envelope
// |coeff(r)| <= decay_C / r^(1 + decay_delta), truncated expansions and
// tail bounds for the Parseval main-term series.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core_arith.hpp"
#include "ramanujan.hpp"
#include "summation.hpp"

namespace ramexp {

/// A provider r -> f^(r) of Ramanujan coefficients.
///
/// `coeff` evaluates a single coefficient; `batch(R)` returns coefficients
/// for r = 0..R (index 0 unused) and is what the bulk sums use.
struct CoefficientSeries {
    std::string label;
    std::function<double(u64)> coeff;
    std::function<std::vector<double>(u64)> batch;
    double decay_C = 1.0;
    double decay_delta = 1.0;

    [[nodiscard]] double operator()(u64 r) const { return coeff(r); }
};

/// Largest r at which the decay envelope is spot-checked.
inline constexpr u64 kDecaySampleLimit = 10'000;

/// sigma_s(n) / n^s = sum over r of zeta(s+1) / r^(s+1) * c_r(n).
inline CoefficientSeries sigma_series(double s) {
    if (!(s > 0)) throw std::invalid_argument("sigma_series: s must be positive");
    const double z = zeta(s + 1.0, 1e-15);
    CoefficientSeries out;
    out.label = "sigma_s(n)/n^s, s=" + detail::param_text(s);
    out.coeff = [z, s](u64 r) { return z * std::pow(static_cast<double>(r), -(s + 1.0)); };
    out.batch = [z, s](u64 R) {
        std::vector<double> v(R + 1, 0.0);
        for (u64 r = 1; r <= R; ++r) v[r] = z * std::pow(static_cast<double>(r), -(s + 1.0));
        return v;
    };
    out.decay_C = z;
    out.decay_delta = s;
    return out;
}

/// J_s(n) / n^s = sum over r of mu(r) / (zeta(s+1) J_{s+1}(r)) * c_r(n).
///
/// decay_C is the sampled sup of |coeff(r)| r^(1+s) over r <= 10^4,
/// inflated by 10%, and never below 1: for squarefree r,
/// |coeff(r)| r^(1+s) = prod_{p | r} (1 - p^-(1+s))^-1 / zeta(s+1) < 1.
inline CoefficientSeries jordan_series(double s) {
    if (!(s > 0)) throw std::invalid_argument("jordan_series: s must be positive");
    const double inv_z = 1.0 / zeta(s + 1.0, 1e-15);
    const double a = s + 1.0;
    // mu(r) / J_a(r) is multiplicative: -1/(p^a - 1) on primes, 0 on higher powers
    auto batch = [inv_z, a](u64 R) {
        auto v = multiplicative_sieve<double>(std::max<u64>(R, 1), [a](u64 p, unsigned e, u64) {
            return e == 1 ? -1.0 / (std::pow(static_cast<double>(p), a) - 1.0) : 0.0;
        });
        for (auto& x : v) x *= inv_z;
        v.resize(R + 1);
        return v;
    };
    CoefficientSeries out;
    out.label = "J_s(n)/n^s, s=" + detail::param_text(s);
    out.coeff = [inv_z, a](u64 r) {
        const auto f = factorize(static_cast<i64>(r));
        if (!f.is_squarefree()) return 0.0;
        double v = inv_z;
        for (const auto& pp : f.factors()) v *= -1.0 / (std::pow(static_cast<double>(pp.prime), a) - 1.0);
        return v;
    };
    out.batch = batch;
    const auto sample = batch(kDecaySampleLimit);
    double sup = 0.0;
    for (u64 r = 1; r <= kDecaySampleLimit; ++r)
        sup = std::max(sup, std::abs(sample[r]) * std::pow(static_cast<double>(r), a));
    out.decay_C = std::max(1.1 * sup, 1.0);
    out.decay_delta = s;
    return out;
}

/// Finitely supported series: coeffs[r - 1] = f^(r) for r = 1..K, zero
/// beyond. decay_C is the exact max of |f^(r)| r^(1+delta) over the support.
inline CoefficientSeries finite_series(std::vector<double> coeffs, double delta, std::string label) {
    if (!(delta > 0)) throw std::invalid_argument("finite_series: delta must be positive");
    if (coeffs.empty()) throw std::invalid_argument("finite_series: empty coefficient list");
    auto shared = std::make_shared<const std::vector<double>>(std::move(coeffs));
    CoefficientSeries out;
    out.label = std::move(label);
    out.coeff = [shared](u64 r) { return (r >= 1 && r <= shared->size()) ? (*shared)[r - 1] : 0.0; };
    out.batch = [shared](u64 R) {
        std::vector<double> v(R + 1, 0.0);
        for (u64 r = 1; r <= std::min<u64>(R, shared->size()); ++r) v[r] = (*shared)[r - 1];
        return v;
    };
    double C = 0.0;
    for (u64 r = 1; r <= shared->size(); ++r)
        C = std::max(C, std::abs((*shared)[r - 1]) * std::pow(static_cast<double>(r), 1.0 + delta));
    out.decay_C = C > 0 ? C : 1e-300;
    out.decay_delta = delta;
    return out;
}

/// Largest |coeff(r)| r^(1+delta) over 1 <= r <= up_to.
inline double measured_decay_constant(const CoefficientSeries& f, u64 up_to = kDecaySampleLimit) {
    const auto v = f.batch(up_to);
    double sup = 0.0;
    for (u64 r = 1; r <= up_to; ++r)
        sup = std::max(sup, std::abs(v[r]) * std::pow(static_cast<double>(r), 1.0 + f.decay_delta));
    return sup;
}

/// sum over r <= R of coeffs[r] c_r(n), compensated.
inline double truncated_eval(std::span<const double> coeffs, u64 n, u64 R, const RamanujanTables& t) {
    if (R < 1) throw std::invalid_argument("truncated_eval: R must be >= 1");
    if (coeffs.size() <= R) throw std::out_of_range("truncated_eval: coefficient batch shorter than R");
    NeumaierSum sum;
    for (u64 r = 1; r <= R; ++r) {
        if (coeffs[r] == 0.0) continue;
        const i64 c = ramanujan_sum_holder(r, n, t);
        if (c != 0) sum.add(coeffs[r] * static_cast<double>(c));
    }
    return sum.value();
}

inline double truncated_eval(const CoefficientSeries& f, u64 n, u64 R, const RamanujanTables& t) {
    const auto coeffs = f.batch(R);
    return truncated_eval(coeffs, n, R, t);
}

/// Certified bound on |sum over r > R of f^(r) g^(r) w_r(h)| with
/// w_r(0) = phi(r) <= r and |w_r(h)| = |c_r(h)| <= sigma_1(h) for h >= 1.
inline double tail_bound(const CoefficientSeries& f, const CoefficientSeries& g, u64 h, u64 R) {
    if (R < 1) throw std::invalid_argument("tail_bound: R must be >= 1");
    const double d = std::min(f.decay_delta, g.decay_delta);
    const double C = f.decay_C * g.decay_C;
    const double Rd = static_cast<double>(R);
    if (h == 0) return C * std::pow(Rd, -2.0 * d) / (2.0 * d);
    const double s1 = sigma_real(factorize(static_cast<i64>(h)), 1.0);
    return C * s1 * std::pow(Rd, -1.0 - 2.0 * d) / (1.0 + 2.0 * d);
}

inline constexpr u64 kTruncationCap = u64{1} << 26;

struct Truncation {
    u64 R = 1;
    double tail = 0.0;
    bool cap_reached = false;
};

/// Smallest power of two R with tail_bound <= target, up to 2^26. When the
/// cap is hit the result carries cap_reached and the tail at the cap.
inline Truncation choose_truncation(const CoefficientSeries& f, const CoefficientSeries& g, u64 h, double target) {
    if (!(target > 0)) throw std::invalid_argument("choose_truncation: target must be positive");
    for (u64 R = 1;; R *= 2) {
        const double tail = tail_bound(f, g, h, R);
        if (tail <= target) return {R, tail, false};
        if (R == kTruncationCap) return {R, tail, true};
    }
}

}  // namespace ramexp
