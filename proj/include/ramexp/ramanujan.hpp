#pragma once

// Ramanujan sums c_r(n): the Moebius-divisor form, Hoelder's closed form,
// whole-period rows and the orthogonality (correlation) sums built on them.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "core_arith.hpp"

namespace ramexp {

/// Read-only tables needed to evaluate c_r(n) for r <= limit.
class RamanujanTables {
public:
    explicit RamanujanTables(u64 limit)
        : spf_(std::max<u64>(limit, 2)),
          mu_(build_table(FnKind::mobius, 0, limit)),
          phi_(build_table(FnKind::phi, 0, limit)) {}

    [[nodiscard]] u64 limit() const noexcept { return mu_.limit(); }
    [[nodiscard]] const SpfTable& spf() const noexcept { return spf_; }
    [[nodiscard]] i64 mu(u64 n) const { return mu_.integer(n); }
    [[nodiscard]] i64 phi(u64 n) const { return phi_.integer(n); }
    [[nodiscard]] const FnTable& mu_table() const noexcept { return mu_; }
    [[nodiscard]] const FnTable& phi_table() const noexcept { return phi_; }

    void require(u64 r) const {
        if (r < 1) throw std::invalid_argument("Ramanujan sum: modulus r must be >= 1");
        if (r > limit()) throw std::out_of_range("Ramanujan sum: modulus exceeds table limit");
    }

private:
    SpfTable spf_;
    FnTable mu_;
    FnTable phi_;
};

namespace detail {
/// gcd(n, r) with the convention gcd(0, r) = r.
inline u64 ramanujan_gcd(u64 r, u64 n) { return n == 0 ? r : std::gcd(r, n); }
}  // namespace detail

/// c_r(n) = sum over d | gcd(n, r) of mu(r/d) d.
inline i64 ramanujan_sum_divisor(u64 r, u64 n, const RamanujanTables& t) {
    t.require(r);
    const u64 g = detail::ramanujan_gcd(r, n);
    i64 acc = 0;
    for (u64 d : divisors(factorize(static_cast<i64>(g), t.spf())))
        acc += t.mu(r / d) * static_cast<i64>(d);
    return acc;
}

/// Hoelder: c_r(n) = phi(r) / phi(r/d) * mu(r/d), d = gcd(n, r).
inline i64 ramanujan_sum_holder(u64 r, u64 n, const RamanujanTables& t) {
    t.require(r);
    const u64 d = detail::ramanujan_gcd(r, n);
    const i64 m = t.mu(r / d);
    if (m == 0) return 0;
    return t.phi(r) / t.phi(r / d) * m;
}

/// One full period of c_r: values[j] = c_r(j), 0 <= j < r.
struct RamanujanRow {
    u64 r = 1;
    std::vector<i64> values;

    [[nodiscard]] i64 operator()(u64 n) const noexcept { return values[n % r]; }
};

/// Scatters mu(r/d) d over the multiples of each divisor d of r.
/// Cost is sigma(r) additions rather than r independent evaluations.
inline RamanujanRow ramanujan_row(u64 r, const RamanujanTables& t) {
    t.require(r);
    RamanujanRow row{r, std::vector<i64>(r, 0)};
    for (u64 d : divisors(factorize(static_cast<i64>(r), t.spf()))) {
        const i64 w = t.mu(r / d) * static_cast<i64>(d);
        if (w == 0) continue;
        for (u64 j = 0; j < r; j += d) row.values[j] += w;
    }
    return row;
}

/// Rows for every modulus 1..max_r, indexed by r (index 0 unused).
inline std::vector<RamanujanRow> ramanujan_rows(u64 max_r, const RamanujanTables& t) {
    std::vector<RamanujanRow> rows(max_r + 1);
    for (u64 r = 1; r <= max_r; ++r) rows[r] = ramanujan_row(r, t);
    return rows;
}

/// sum over 1 <= n <= N of c_r(n) c_s(n + h), exact.
///
/// Uses one period of length lcm(r, s) and multiplies it out, so the cost is
/// O(lcm(r, s)) regardless of N.
inline i64 correlation_sum(const RamanujanRow& row_r, const RamanujanRow& row_s, u64 N, u64 h) {
    const u64 L = std::lcm(row_r.r, row_s.r);
    auto partial = [&](u64 upto) {
        __int128 acc = 0;
        for (u64 n = 1; n <= upto; ++n) acc += static_cast<__int128>(row_r(n)) * row_s(n + h);
        return acc;
    };
    const __int128 full = partial(std::min(L, N));
    if (N <= L) return static_cast<i64>(full);
    const __int128 total = static_cast<__int128>(N / L) * full + partial(N % L);
    if (total > std::numeric_limits<i64>::max() || total < std::numeric_limits<i64>::min())
        throw std::overflow_error("correlation_sum: result exceeds 64 bits");
    return static_cast<i64>(total);
}

/// |correlation_sum - [r == s] N c_r(h)| / (r s log(2 r s)).
inline double orthogonality_deviation(const RamanujanRow& row_r, const RamanujanRow& row_s, u64 N, u64 h) {
    const i64 sum = correlation_sum(row_r, row_s, N, h);
    const __int128 diag = row_r.r == row_s.r ? static_cast<__int128>(N) * row_r(h) : 0;
    const auto dev = static_cast<double>(sum - diag);
    const double rs = static_cast<double>(row_r.r) * static_cast<double>(row_s.r);
    return std::abs(dev) / (rs * std::log(2.0 * rs));
}

}  // namespace ramexp
