#pragma once

// Sieves and exact evaluators for the classical arithmetic functions
// (mu, phi, d_k, sigma_s, Jordan J_s, Mertens) plus real-argument zeta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "summation.hpp"

namespace ramexp {

using u64 = std::uint64_t;
using i64 = std::int64_t;

/// Largest table limit any sieve will accept.
inline constexpr u64 kMaxTableLimit = u64{1} << 31;

namespace detail {
inline void check_table_limit(u64 limit, const char* who) {
    if (limit > kMaxTableLimit)
        throw std::length_error(std::string(who) + ": limit exceeds 2^31");
}

/// Short "%g" rendering of a real parameter for labels.
inline std::string param_text(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Smallest-prime-factor sieve
// ---------------------------------------------------------------------------

class SpfTable {
public:
    SpfTable() = default;

    explicit SpfTable(u64 limit) : limit_(limit) {
        if (limit < 2) throw std::invalid_argument("build_spf_sieve: limit must be >= 2");
        detail::check_table_limit(limit, "build_spf_sieve");
        spf_.assign(limit + 1, 0);
        for (u64 i = 2; i <= limit; ++i) {
            if (spf_[i] == 0) {
                spf_[i] = static_cast<std::uint32_t>(i);
                primes_.push_back(static_cast<std::uint32_t>(i));
            }
            const std::uint32_t si = spf_[i];
            for (std::uint32_t p : primes_) {
                if (p > si || static_cast<u64>(p) * i > limit) break;
                spf_[static_cast<u64>(p) * i] = p;
            }
        }
    }

    [[nodiscard]] u64 limit() const noexcept { return limit_; }

    /// Smallest prime factor of n, 2 <= n <= limit.
    [[nodiscard]] std::uint32_t operator[](u64 n) const {
        if (n < 2 || n > limit_) throw std::out_of_range("SpfTable: index out of range");
        return spf_[n];
    }

    [[nodiscard]] bool is_prime(u64 n) const { return n >= 2 && (*this)[n] == n; }

    [[nodiscard]] std::span<const std::uint32_t> primes() const noexcept { return primes_; }

private:
    u64 limit_ = 0;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint32_t> primes_;
};

inline SpfTable build_spf_sieve(u64 limit) { return SpfTable(limit); }

// ---------------------------------------------------------------------------
// Factored integers
// ---------------------------------------------------------------------------

struct PrimePower {
    u64 prime;
    unsigned exponent;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// A positive integer together with its canonical factorization.
class FactoredInteger {
public:
    FactoredInteger() = default;  // the integer 1

    /// Validates the factor list: strictly increasing primes, positive
    /// exponents, product fits in 64 bits.
    explicit FactoredInteger(std::vector<PrimePower> factors) : factors_(std::move(factors)) {
        u64 n = 1;
        u64 prev = 1;
        for (const auto& [p, e] : factors_) {
            if (p <= prev || e == 0)
                throw std::invalid_argument("FactoredInteger: factors not canonical");
            for (unsigned i = 0; i < e; ++i)
                if (__builtin_mul_overflow(n, p, &n))
                    throw std::overflow_error("FactoredInteger: value exceeds 64 bits");
            prev = p;
        }
        n_ = n;
    }

    [[nodiscard]] u64 value() const noexcept { return n_; }
    [[nodiscard]] const std::vector<PrimePower>& factors() const noexcept { return factors_; }
    [[nodiscard]] bool is_one() const noexcept { return factors_.empty(); }
    [[nodiscard]] bool is_squarefree() const noexcept {
        return std::all_of(factors_.begin(), factors_.end(),
                           [](const PrimePower& f) { return f.exponent == 1; });
    }

    friend bool operator==(const FactoredInteger& a, const FactoredInteger& b) {
        return a.factors_ == b.factors_;
    }

private:
    u64 n_ = 1;
    std::vector<PrimePower> factors_;
};

inline FactoredInteger factorize(i64 n, const SpfTable& spf) {
    if (n < 1) throw std::invalid_argument("factorize: n must be positive");
    if (static_cast<u64>(n) > spf.limit()) throw std::out_of_range("factorize: n exceeds sieve limit");
    std::vector<PrimePower> out;
    auto m = static_cast<u64>(n);
    while (m > 1) {
        const u64 p = spf[m];
        unsigned e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    return FactoredInteger(std::move(out));
}

/// Trial-division factorization for values outside any sieve.
inline FactoredInteger factorize(i64 n) {
    if (n < 1) throw std::invalid_argument("factorize: n must be positive");
    std::vector<PrimePower> out;
    auto m = static_cast<u64>(n);
    for (u64 p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p != 0) continue;
        unsigned e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    if (m > 1) out.push_back({m, 1});
    return FactoredInteger(std::move(out));
}

/// All divisors in ascending order.
inline std::vector<u64> divisors(const FactoredInteger& f) {
    std::vector<u64> out{1};
    for (const auto& [p, e] : f.factors()) {
        const std::size_t base = out.size();
        u64 pk = 1;
        for (unsigned i = 1; i <= e; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Multiplicative evaluators straight from a factorization.

inline int mobius(const FactoredInteger& f) {
    if (!f.is_squarefree()) return 0;
    return (f.factors().size() % 2 == 0) ? 1 : -1;
}

inline i64 euler_phi(const FactoredInteger& f) {
    i64 r = 1;
    for (const auto& [p, e] : f.factors()) {
        r *= static_cast<i64>(p - 1);
        for (unsigned i = 1; i < e; ++i) r *= static_cast<i64>(p);
    }
    return r;
}

/// d_k(n) = prod over p^e || n of binomial(e + k - 1, k - 1).
inline i64 divisor_k(const FactoredInteger& f, unsigned k) {
    if (k < 1) throw std::invalid_argument("divisor_k: k must be >= 1");
    i64 r = 1;
    for (const auto& pp : f.factors()) {
        i64 c = 1;
        for (unsigned i = 1; i <= pp.exponent; ++i) c = c * static_cast<i64>(k - 1 + i) / static_cast<i64>(i);
        r *= c;
    }
    return r;
}

/// sigma_s(n) = sum over d | n of d^s, for any real s.
/// Exact when s is a nonnegative integer and the value stays below 2^53.
inline double sigma_real(const FactoredInteger& f, double s) {
    if (s >= 0 && s == std::floor(s) && s <= 64) {
        const auto k = static_cast<unsigned>(s);
        unsigned __int128 acc = 1;
        bool ok = true;
        for (const auto& [p, e] : f.factors()) {
            unsigned __int128 term = 1, pks = 1, ps = 1;
            for (unsigned i = 0; i < k && ok; ++i) {
                ps *= p;
                ok = ps < (static_cast<unsigned __int128>(1) << 64);
            }
            for (unsigned i = 1; i <= e && ok; ++i) {
                pks *= ps;
                term += pks;
                ok = term < (static_cast<unsigned __int128>(1) << 64);
            }
            if (ok) {
                acc *= term;
                ok = acc < (static_cast<unsigned __int128>(1) << 53);
            }
            if (!ok) break;
        }
        if (ok) return static_cast<double>(static_cast<u64>(acc));
    }
    double r = 1.0;
    for (const auto& [p, e] : f.factors()) {
        const double ps = std::pow(static_cast<double>(p), s);
        double term = 1.0, pk = 1.0;
        for (unsigned i = 1; i <= e; ++i) {
            pk *= ps;
            term += pk;
        }
        r *= term;
    }
    return r;
}

/// Jordan totient J_s(n) = n^s prod over p | n of (1 - p^-s).
inline double jordan_real(const FactoredInteger& f, double s) {
    double r = 1.0;
    for (const auto& [p, e] : f.factors()) {
        const double pe = std::pow(static_cast<double>(p), s * e);
        const double pe1 = std::pow(static_cast<double>(p), s * (e - 1));
        r *= pe - pe1;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Generic multiplicative sieve
// ---------------------------------------------------------------------------

/// Fills values[1..limit] of the multiplicative function whose value on a
/// prime power p^e is prime_power(p, e, p^e). Linear sieve, O(limit).
template <typename T, typename PrimePowerFn>
std::vector<T> multiplicative_sieve(u64 limit, PrimePowerFn&& prime_power) {
    detail::check_table_limit(limit, "multiplicative_sieve");
    std::vector<T> f(limit + 1, T{});
    if (limit >= 1) f[1] = T{1};
    // pk[n] = largest power of spf(n) dividing n; ex[n] its exponent
    std::vector<std::uint32_t> pk(limit + 1, 0);
    std::vector<std::uint8_t> ex(limit + 1, 0);
    std::vector<std::uint32_t> spf(limit + 1, 0);
    std::vector<std::uint32_t> primes;
    for (u64 i = 2; i <= limit; ++i) {
        if (spf[i] == 0) {
            spf[i] = static_cast<std::uint32_t>(i);
            pk[i] = static_cast<std::uint32_t>(i);
            ex[i] = 1;
            primes.push_back(static_cast<std::uint32_t>(i));
            f[i] = prime_power(i, 1u, i);
        }
        for (std::uint32_t p : primes) {
            const u64 n = static_cast<u64>(p) * i;
            if (p > spf[i] || n > limit) break;
            spf[n] = p;
            if (p == spf[i]) {
                pk[n] = pk[i] * p;
                ex[n] = static_cast<std::uint8_t>(ex[i] + 1);
                if (pk[n] == n)
                    f[n] = prime_power(static_cast<u64>(p), static_cast<unsigned>(ex[n]), n);
                else
                    f[n] = f[n / pk[n]] * f[pk[n]];
            } else {
                pk[n] = p;
                ex[n] = 1;
                f[n] = f[i] * f[p];
            }
        }
    }
    return f;
}

/// Dirichlet convolution (a * b)(n) = sum over ab = n of a(a) b(b) on 1..limit,
/// with overflow detection.
inline std::vector<i64> dirichlet_convolve(std::span<const i64> a, std::span<const i64> b) {
    const std::size_t limit = std::min(a.size(), b.size()) - 1;
    std::vector<i64> c(limit + 1, 0);
    for (std::size_t i = 1; i <= limit; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 1, n = i; n <= limit; ++j, n += i) {
            i64 prod = 0;
            if (__builtin_mul_overflow(a[i], b[j], &prod) || __builtin_add_overflow(c[n], prod, &c[n]))
                throw std::overflow_error("dirichlet_convolve: 64-bit overflow");
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Function tables
// ---------------------------------------------------------------------------

enum class FnKind : std::uint8_t { mobius, phi, divisor_k, sigma_s, jordan_s, mertens, custom };

inline std::string_view to_string(FnKind k) {
    switch (k) {
        case FnKind::mobius: return "mobius";
        case FnKind::phi: return "phi";
        case FnKind::divisor_k: return "divisor_k";
        case FnKind::sigma_s: return "sigma_s";
        case FnKind::jordan_s: return "jordan_s";
        case FnKind::mertens: return "mertens";
        case FnKind::custom: return "custom";
    }
    return "unknown";
}

inline FnKind fn_kind_from_string(std::string_view name) {
    for (auto k : {FnKind::mobius, FnKind::phi, FnKind::divisor_k, FnKind::sigma_s, FnKind::jordan_s,
                   FnKind::mertens, FnKind::custom})
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unsupported table kind: " + std::string(name));
}

/// Dense table of one arithmetic function on [1..limit]. Index 0 is unused.
/// Integer-valued kinds (mobius, phi, divisor_k, mertens) hold exact int64;
/// sigma_s, jordan_s and custom hold doubles.
class FnTable {
public:
    using IntValues = std::vector<i64>;
    using RealValues = std::vector<double>;

    FnTable(FnKind kind, double param, IntValues values)
        : kind_(kind), param_(param), values_(std::move(values)) {
        check_shape();
    }
    FnTable(FnKind kind, double param, RealValues values)
        : kind_(kind), param_(param), values_(std::move(values)) {
        check_shape();
    }

    /// Custom table from values on 1..limit (values[0] is ignored).
    static FnTable custom(RealValues values, std::string label = "custom") {
        FnTable t(FnKind::custom, 0.0, std::move(values));
        t.label_ = std::move(label);
        return t;
    }

    [[nodiscard]] FnKind kind() const noexcept { return kind_; }
    [[nodiscard]] double param() const noexcept { return param_; }
    [[nodiscard]] u64 limit() const noexcept {
        return std::visit([](const auto& v) { return static_cast<u64>(v.size() - 1); }, values_);
    }
    [[nodiscard]] bool is_integral() const noexcept { return std::holds_alternative<IntValues>(values_); }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    [[nodiscard]] double operator[](u64 n) const {
        return std::visit([n](const auto& v) { return static_cast<double>(v[n]); }, values_);
    }
    [[nodiscard]] double at(u64 n) const {
        if (n < 1 || n > limit()) throw std::out_of_range("FnTable: index out of range");
        return (*this)[n];
    }
    [[nodiscard]] i64 integer(u64 n) const {
        if (n < 1 || n > limit()) throw std::out_of_range("FnTable: index out of range");
        if (!is_integral()) throw std::logic_error("FnTable: not an integer-valued table");
        return std::get<IntValues>(values_)[n];
    }

    [[nodiscard]] std::span<const i64> integers() const { return std::get<IntValues>(values_); }
    [[nodiscard]] std::span<const double> reals() const { return std::get<RealValues>(values_); }

    friend bool operator==(const FnTable& a, const FnTable& b) {
        return a.kind_ == b.kind_ && (a.param_ == b.param_ || (std::isnan(a.param_) && std::isnan(b.param_))) &&
               a.values_ == b.values_;
    }

private:
    void check_shape() const {
        const bool empty = std::visit([](const auto& v) { return v.size() < 2; }, values_);
        if (empty) throw std::invalid_argument("FnTable: limit must be >= 1");
    }

    FnKind kind_;
    double param_;
    std::variant<IntValues, RealValues> values_;
    std::string label_;
};

/// Builds a table. `param` is k for divisor_k and s for sigma_s / jordan_s;
/// ignored otherwise.
inline FnTable build_table(FnKind kind, double param, u64 limit) {
    if (limit < 1) throw std::invalid_argument("build_table: limit must be >= 1");
    detail::check_table_limit(limit, "build_table");
    switch (kind) {
        case FnKind::mobius:
            return {kind, 0.0, multiplicative_sieve<i64>(limit, [](u64, unsigned e, u64) -> i64 {
                        return e == 1 ? -1 : 0;
                    })};
        case FnKind::phi:
            return {kind, 0.0, multiplicative_sieve<i64>(limit, [](u64 p, unsigned, u64 pk) -> i64 {
                        return static_cast<i64>(pk - pk / p);
                    })};
        case FnKind::mertens: {
            auto mu = multiplicative_sieve<i64>(limit, [](u64, unsigned e, u64) -> i64 { return e == 1 ? -1 : 0; });
            std::partial_sum(mu.begin() + 1, mu.end(), mu.begin() + 1);
            return {kind, 0.0, std::move(mu)};
        }
        case FnKind::divisor_k: {
            if (param < 2 || param != std::floor(param) || param > 64)
                throw std::invalid_argument("build_table: divisor_k needs integer k in [2, 64]");
            auto k = static_cast<unsigned>(param);
            const std::vector<i64> one(limit + 1, 1);
            // d_k by binary powering of the Dirichlet convolution of 1 with itself
            std::vector<i64> result;
            std::vector<i64> base = one;
            bool have = false;
            while (k > 0) {
                if (k & 1u) {
                    result = have ? dirichlet_convolve(result, base) : base;
                    have = true;
                }
                k >>= 1;
                if (k > 0) base = dirichlet_convolve(base, base);
            }
            result[0] = 0;
            return {kind, param, std::move(result)};
        }
        case FnKind::sigma_s: {
            const double s = param;
            return {kind, s, multiplicative_sieve<double>(limit, [s](u64 p, unsigned e, u64) {
                        const double ps = std::pow(static_cast<double>(p), s);
                        double term = 1.0, pk = 1.0;
                        for (unsigned i = 1; i <= e; ++i) {
                            pk *= ps;
                            term += pk;
                        }
                        return term;
                    })};
        }
        case FnKind::jordan_s: {
            const double s = param;
            return {kind, s, multiplicative_sieve<double>(limit, [s](u64 p, unsigned e, u64) {
                        return std::pow(static_cast<double>(p), s * e) - std::pow(static_cast<double>(p), s * (e - 1));
                    })};
        }
        case FnKind::custom:
            break;
    }
    throw std::invalid_argument("build_table: unsupported kind " + std::string(to_string(kind)));
}

/// Table of sigma_s(n) / n^s = sigma_{-s}(n).
inline FnTable build_sigma_ratio_table(double s, u64 limit) {
    auto t = build_table(FnKind::sigma_s, -s, limit);
    return FnTable::custom(std::vector<double>(t.reals().begin(), t.reals().end()),
                           "sigma_" + detail::param_text(s) + "(n)/n^s");
}

/// Table of J_s(n) / n^s = prod over p | n of (1 - p^-s).
inline FnTable build_jordan_ratio_table(double s, u64 limit) {
    auto v = multiplicative_sieve<double>(limit, [s](u64 p, unsigned, u64) {
        return 1.0 - std::pow(static_cast<double>(p), -s);
    });
    return FnTable::custom(std::move(v), "J_" + detail::param_text(s) + "(n)/n^s");
}

// ---------------------------------------------------------------------------
// Binary table cache
// ---------------------------------------------------------------------------

namespace detail {
inline constexpr char kTableMagic[4] = {'R', 'X', 'T', 'B'};
inline constexpr std::uint32_t kTableVersion = 1;
inline constexpr std::uint16_t kEndianTag = 0x0102;
}  // namespace detail

/// Layout: magic "RXTB", u32 version, u8 kind, u8 value type (0 int64,
/// 1 double), u16 endianness tag 0x0102 in writer byte order, f64 param,
/// u64 limit, then values[1..limit] raw.
inline void save_table(const FnTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_table: cannot open " + path);
    const auto kind = static_cast<std::uint8_t>(t.kind());
    const std::uint8_t vtype = t.is_integral() ? 0 : 1;
    const double param = t.param();
    const u64 limit = t.limit();
    out.write(detail::kTableMagic, 4);
    out.write(reinterpret_cast<const char*>(&detail::kTableVersion), sizeof detail::kTableVersion);
    out.write(reinterpret_cast<const char*>(&kind), 1);
    out.write(reinterpret_cast<const char*>(&vtype), 1);
    out.write(reinterpret_cast<const char*>(&detail::kEndianTag), sizeof detail::kEndianTag);
    out.write(reinterpret_cast<const char*>(&param), sizeof param);
    out.write(reinterpret_cast<const char*>(&limit), sizeof limit);
    if (t.is_integral())
        out.write(reinterpret_cast<const char*>(t.integers().data() + 1), static_cast<std::streamsize>(limit * 8));
    else
        out.write(reinterpret_cast<const char*>(t.reals().data() + 1), static_cast<std::streamsize>(limit * 8));
    if (!out) throw std::runtime_error("save_table: write failed for " + path);
}

inline FnTable load_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_table: cannot open " + path);
    char magic[4];
    std::uint32_t version = 0;
    std::uint8_t kind = 0, vtype = 0;
    std::uint16_t tag = 0;
    double param = 0;
    u64 limit = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&kind), 1);
    in.read(reinterpret_cast<char*>(&vtype), 1);
    in.read(reinterpret_cast<char*>(&tag), sizeof tag);
    in.read(reinterpret_cast<char*>(&param), sizeof param);
    in.read(reinterpret_cast<char*>(&limit), sizeof limit);
    if (!in || !std::equal(magic, magic + 4, detail::kTableMagic))
        throw std::runtime_error("load_table: not a table file: " + path);
    if (version != detail::kTableVersion) throw std::runtime_error("load_table: unsupported version");
    if (tag != detail::kEndianTag) throw std::runtime_error("load_table: endianness mismatch");
    if (kind > static_cast<std::uint8_t>(FnKind::custom) || vtype > 1 || limit < 1)
        throw std::runtime_error("load_table: corrupt header");
    detail::check_table_limit(limit, "load_table");
    auto read_values = [&](auto& v) {
        v.assign(limit + 1, {});
        in.read(reinterpret_cast<char*>(v.data() + 1), static_cast<std::streamsize>(limit * 8));
        if (!in) throw std::runtime_error("load_table: truncated file " + path);
    };
    if (vtype == 0) {
        FnTable::IntValues v;
        read_values(v);
        return {static_cast<FnKind>(kind), param, std::move(v)};
    }
    FnTable::RealValues v;
    read_values(v);
    return {static_cast<FnKind>(kind), param, std::move(v)};
}

// ---------------------------------------------------------------------------
// Riemann zeta for real s > 1
// ---------------------------------------------------------------------------

/// zeta(s) for real s > 1: direct sum to M - 1 plus the Euler-Maclaurin
/// tail M^(1-s)/(s-1) + M^-s/2 + s M^(-s-1)/12 - s(s+1)(s+2) M^(-s-3)/720.
/// M is the smallest cutoff (at least 16, at most 10^7) whose next term,
/// s(s+1)(s+2)(s+3)(s+4) M^(-s-5)/30240, is below tol. Accuracy is then
/// limited to a few ulps by double precision.
inline double zeta(double s, double tol = 1e-15) {
    if (!(s > 1.0)) throw std::domain_error("zeta: requires s > 1");
    if (!(tol > 0.0)) throw std::invalid_argument("zeta: tol must be positive");
    const double next_term = s * (s + 1) * (s + 2) * (s + 3) * (s + 4) / 30240.0;
    const double m_real = std::pow(next_term / tol, 1.0 / (s + 5.0));
    const u64 M = static_cast<u64>(std::clamp(std::ceil(m_real), 16.0, 1e7));
    NeumaierSum sum;
    for (u64 n = M - 1; n >= 1; --n) sum.add(std::pow(static_cast<double>(n), -s));
    const double Md = static_cast<double>(M);
    sum.add(std::pow(Md, 1.0 - s) / (s - 1.0));
    sum.add(0.5 * std::pow(Md, -s));
    sum.add(s * std::pow(Md, -s - 1.0) / 12.0);
    sum.add(-s * (s + 1) * (s + 2) * std::pow(Md, -s - 3.0) / 720.0);
    return sum.value();
}

}  // namespace ramexp
