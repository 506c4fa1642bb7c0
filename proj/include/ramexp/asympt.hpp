#pragma once

// Desk-scale checks of the classical average-order results used alongside
// the convolution formulas: sum of phi, the Mertens function, sums of d_k,
// weighted divisor sums and the shifted divisor correlation sum d(n)d(n+h).
//
// Each check records partial sums on a grid, the leading-term model and
// |partial - model| divided by the second-order shape. A big-O claim is read
// as: the normalized deviation stays bounded across the grid.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "core_arith.hpp"
#include "summation.hpp"

namespace ramexp {

struct AsymptoticCheck {
    std::string label;
    std::vector<u64> grid;
    std::vector<double> partial_sums;
    std::vector<double> model_values;
    std::vector<double> normalized_deviations;

    /// max / min of the normalized deviations (infinity if min is 0).
    [[nodiscard]] double spread() const {
        if (normalized_deviations.empty()) return 1.0;
        const auto [lo, hi] = std::minmax_element(normalized_deviations.begin(), normalized_deviations.end());
        return *lo > 0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    }
};

namespace detail {
inline void check_grid(const std::vector<u64>& grid, u64 limit, const char* who) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 1) throw std::invalid_argument(std::string(who) + ": grid values must be >= 1");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw std::invalid_argument(std::string(who) + ": grid must be strictly increasing");
        if (grid[i] > limit) throw std::out_of_range(std::string(who) + ": grid exceeds table limit");
    }
}

inline void require_kind(const FnTable& t, FnKind kind, const char* who) {
    if (t.kind() != kind)
        throw std::invalid_argument(std::string(who) + ": expected a " + std::string(to_string(kind)) + " table");
}

/// Exact integer prefix sums of an integer table sampled on the grid.
inline std::vector<double> integer_prefix_at(const FnTable& t, const std::vector<u64>& grid) {
    std::vector<double> out;
    __int128 acc = 0;
    u64 n = 0;
    for (u64 x : grid) {
        for (; n < x;) acc += t.integer(++n);
        out.push_back(static_cast<double>(acc));
    }
    return out;
}
}  // namespace detail

/// sum_{k<=x} phi(k) against (3/pi^2) x^2, normalized by x log x.
inline AsymptoticCheck check_phi_average(const FnTable& phi, const std::vector<u64>& grid) {
    detail::require_kind(phi, FnKind::phi, "check_phi_average");
    detail::check_grid(grid, phi.limit(), "check_phi_average");
    AsymptoticCheck c{"phi_average", grid, detail::integer_prefix_at(phi, grid), {}, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = static_cast<double>(grid[i]);
        c.model_values.push_back(3.0 / (std::numbers::pi * std::numbers::pi) * x * x);
        const double shape = x > 1 ? x * std::log(x) : 1.0;
        c.normalized_deviations.push_back(std::abs(c.partial_sums[i] - c.model_values[i]) / shape);
    }
    return c;
}

/// M(x) from a Mertens table; model 0, normalized by x.
inline AsymptoticCheck check_mertens(const FnTable& mertens, const std::vector<u64>& grid) {
    detail::require_kind(mertens, FnKind::mertens, "check_mertens");
    detail::check_grid(grid, mertens.limit(), "check_mertens");
    AsymptoticCheck c{"mertens", grid, {}, {}, {}};
    for (u64 x : grid) {
        const auto m = static_cast<double>(mertens.integer(x));
        c.partial_sums.push_back(m);
        c.model_values.push_back(0.0);
        c.normalized_deviations.push_back(std::abs(m) / static_cast<double>(x));
    }
    return c;
}

/// sum_{n<=x} d_k(n) against x (log x)^(k-1) / (k-1)!, normalized by
/// x (log x)^(k-2). `dk` must be a divisor_k table with the same k.
inline AsymptoticCheck check_dk_average(unsigned k, const FnTable& dk, const std::vector<u64>& grid) {
    if (k < 2 || k > 4) throw std::invalid_argument("check_dk_average: k must be 2, 3 or 4");
    detail::require_kind(dk, FnKind::divisor_k, "check_dk_average");
    if (dk.param() != k) throw std::invalid_argument("check_dk_average: table built for a different k");
    detail::check_grid(grid, dk.limit(), "check_dk_average");
    AsymptoticCheck c{"d" + std::to_string(k) + "_average", grid, detail::integer_prefix_at(dk, grid), {}, {}};
    double fact = 1;
    for (unsigned i = 2; i < k; ++i) fact *= i;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = static_cast<double>(grid[i]);
        const double L = std::log(x);
        c.model_values.push_back(x * std::pow(L, k - 1) / fact);
        const double shape = x * std::pow(L, static_cast<double>(k) - 2);
        c.normalized_deviations.push_back(shape > 0 ? std::abs(c.partial_sums[i] - c.model_values[i]) / shape
                                                     : std::abs(c.partial_sums[i] - c.model_values[i]));
    }
    return c;
}

/// sum_{t<=U} d(t) / t^delta, 0 < delta <= 1. `d` is a divisor_k table, k = 2.
inline double weighted_divisor_sum(const FnTable& d, u64 U, double delta) {
    if (!(delta > 0) || delta > 1) throw std::invalid_argument("weighted_divisor_sum: delta must be in (0, 1]");
    detail::require_kind(d, FnKind::divisor_k, "weighted_divisor_sum");
    if (d.param() != 2) throw std::invalid_argument("weighted_divisor_sum: needs the d_2 table");
    if (U < 1 || U > d.limit()) throw std::out_of_range("weighted_divisor_sum: U outside table");
    NeumaierSum sum;
    for (u64 t = 1; t <= U; ++t) sum.add(static_cast<double>(d.integer(t)) * std::pow(static_cast<double>(t), -delta));
    return sum.value();
}

/// Weighted divisor sums normalized by U^(1-delta) log U (delta < 1) or
/// log^2 U (delta = 1). The model column holds the normalizer itself.
inline AsymptoticCheck check_weighted_divisor(const FnTable& d, const std::vector<u64>& grid, double delta) {
    (void)weighted_divisor_sum(d, 1, delta);  // validates table and delta
    detail::check_grid(grid, d.limit(), "check_weighted_divisor");
    AsymptoticCheck c{"weighted_divisor_delta_" + detail::param_text(delta), grid, {}, {}, {}};
    NeumaierSum sum;
    u64 t = 0;
    for (u64 U : grid) {
        for (; t < U;) {
            ++t;
            sum.add(static_cast<double>(d.integer(t)) * std::pow(static_cast<double>(t), -delta));
        }
        const double Ud = static_cast<double>(U);
        const double L = std::log(Ud);
        const double shape = delta < 1 ? std::pow(Ud, 1 - delta) * L : L * L;
        c.partial_sums.push_back(sum.value());
        c.model_values.push_back(shape);
        c.normalized_deviations.push_back(shape > 0 ? sum.value() / shape : sum.value());
    }
    return c;
}

/// Exact sum_{n<=N} d(n) d(n+h).
inline i64 ingham_sum(const FnTable& d, u64 N, u64 h) {
    detail::require_kind(d, FnKind::divisor_k, "ingham_sum");
    if (d.param() != 2) throw std::invalid_argument("ingham_sum: needs the d_2 table");
    if (h < 1) throw std::invalid_argument("ingham_sum: h must be >= 1");
    if (N + h > d.limit()) throw std::out_of_range("ingham_sum: N + h exceeds table limit");
    i64 acc = 0;
    for (u64 n = 1; n <= N; ++n) acc += d.integer(n) * d.integer(n + h);
    return acc;
}

/// (6/pi^2) sigma_{-1}(h) N log^2 N.
inline double ingham_model(u64 N, u64 h) {
    const double L = std::log(static_cast<double>(N));
    return 6.0 / (std::numbers::pi * std::numbers::pi) * sigma_real(factorize(static_cast<i64>(h)), -1.0) *
           static_cast<double>(N) * L * L;
}

inline double ingham_ratio(const FnTable& d, u64 N, u64 h) {
    return static_cast<double>(ingham_sum(d, N, h)) / ingham_model(N, h);
}

/// Ingham sums on a grid; the deviation column holds sum / model.
inline AsymptoticCheck check_ingham(const FnTable& d, const std::vector<u64>& grid, u64 h) {
    detail::check_grid(grid, d.limit() - std::min(d.limit(), h), "check_ingham");
    AsymptoticCheck c{"ingham_h" + std::to_string(h), grid, {}, {}, {}};
    for (u64 N : grid) {
        const auto sum = static_cast<double>(ingham_sum(d, N, h));
        const double model = ingham_model(N, h);
        c.partial_sums.push_back(sum);
        c.model_values.push_back(model);
        c.normalized_deviations.push_back(sum / model);
    }
    return c;
}

}  // namespace ramexp
