#pragma once

/// Floating-point accumulation used by every sum in the library.
///
/// NeumaierSum is a compensated running sum (error-free TwoSum per step).
/// ExactAccumulator keeps the exact value of a sum of doubles as a long
/// fixed-point integer, so the result does not depend on summation order
/// or on how the range was split into chunks.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace ramexp {

class NeumaierSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    NeumaierSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }

    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Kulisch-style exact accumulator for finite doubles.
///
/// The value is sum(limb[i] * 2^(32*(i - kBias))). Each add splits the
/// 53-bit mantissa over at most three 32-bit limbs; limbs are int64 so
/// carries can be deferred for 2^30 additions.
class ExactAccumulator {
public:
    void add(double x) {
        if (x == 0.0) return;
        if (!std::isfinite(x)) throw std::domain_error("ExactAccumulator: non-finite input");
        int exp = 0;
        const double frac = std::frexp(x, &exp);  // x = frac * 2^exp, 0.5 <= |frac| < 1
        // integer mantissa m with x = m * 2^(exp - 53)
        const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
        const int low_exp = exp - 53;
        // shift so that limb boundaries are multiples of 32 bits
        const int biased = low_exp + 32 * kBias;
        const int limb = biased >> 5;
        const int shift = biased & 31;
        const __int128 wide = static_cast<__int128>(mant) << shift;
        const bool neg = wide < 0;
        unsigned __int128 mag = neg ? static_cast<unsigned __int128>(-wide)
                                    : static_cast<unsigned __int128>(wide);
        for (int k = 0; k < 3 && mag != 0; ++k) {
            const auto part = static_cast<std::int64_t>(mag & 0xffffffffu);
            limbs_[limb + k] += neg ? -part : part;
            mag >>= 32;
        }
        if (++pending_ >= kCarryInterval) normalize();
    }

    ExactAccumulator& operator+=(double x) {
        add(x);
        return *this;
    }

    /// Exact merge; order of merges does not affect the result.
    void merge(const ExactAccumulator& other) {
        ExactAccumulator rhs = other;
        rhs.normalize();
        normalize();
        for (std::size_t i = 0; i < kLimbs; ++i) limbs_[i] += rhs.limbs_[i];
        normalize();
    }

    /// Nearest-double approximation of the exact sum (within one ulp).
    /// Deterministic: depends only on the exact value.
    [[nodiscard]] double value() const {
        ExactAccumulator tmp = *this;
        tmp.normalize();
        // after normalize only the top limb can be negative; work on |sum|
        const bool neg = tmp.limbs_[kLimbs - 1] < 0;
        if (neg) {
            for (auto& l : tmp.limbs_) l = -l;
            tmp.normalize();
        }
        NeumaierSum s;
        for (std::size_t i = kLimbs; i-- > 0;) {
            if (tmp.limbs_[i] == 0) continue;
            s.add(std::ldexp(static_cast<double>(tmp.limbs_[i]),
                             32 * (static_cast<int>(i) - kBias)));
        }
        return neg ? -s.value() : s.value();
    }

private:
    // lowest mantissa bit of a subnormal is 2^-1126; limbs cover 2^-1152 .. 2^1152
    static constexpr int kBias = 36;
    static constexpr std::size_t kLimbs = 72;
    static constexpr int kCarryInterval = 1 << 30;

    void normalize() noexcept {
        for (std::size_t i = 0; i + 1 < kLimbs; ++i) {
            const std::int64_t carry = limbs_[i] >> 32;  // arithmetic shift
            limbs_[i] -= carry * (std::int64_t{1} << 32);
            limbs_[i + 1] += carry;
        }
        pending_ = 0;
    }

    std::array<std::int64_t, kLimbs> limbs_{};
    int pending_ = 0;
};

}  // namespace ramexp
