#include "csgs/exact_sum.hpp"

#include <bit>
#include <cmath>

namespace csgs {

__extension__ typedef unsigned __int128 u128;

void ExactAccumulator::add(double x) {
    if (x == 0.0) return;
    if (!std::isfinite(x)) {
        special_ += x;
        has_special_ = true;
        return;
    }
    int exp = 0;
    const double m = std::frexp(x, &exp);
    const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
    const int lsb = exp - 53 + kBias;
    const int limb = lsb >> 5;
    const int off = lsb & 31;

    const bool negative = mant < 0;
    const auto mag = static_cast<u128>(negative ? -mant : mant) << off;
    for (int i = 0; i < 3; ++i) {
        const auto digit = static_cast<std::int64_t>((mag >> (32 * i)) & 0xffffffffu);
        limbs_[limb + i] += negative ? -digit : digit;
    }
    if (++pending_ >= kMaxPending) normalize();
}

void ExactAccumulator::merge(const ExactAccumulator& other) {
    ExactAccumulator rhs = other;
    rhs.normalize();
    normalize();
    for (int i = 0; i < kLimbs; ++i) limbs_[i] += rhs.limbs_[i];
    pending_ = 2;
    if (other.has_special_) {
        special_ += other.special_;
        has_special_ = true;
    }
}

void ExactAccumulator::normalize() {
    for (int i = 0; i + 1 < kLimbs; ++i) {
        const std::int64_t carry = limbs_[i] >> 32;  // floor division
        limbs_[i] -= carry * (std::int64_t{1} << 32);
        limbs_[i + 1] += carry;
    }
    pending_ = 0;
}

double ExactAccumulator::result() const {
    if (has_special_) return special_;

    ExactAccumulator acc = *this;
    acc.normalize();
    double sign = 1.0;
    if (acc.limbs_[kLimbs - 1] < 0) {
        for (auto& l : acc.limbs_) l = -l;
        acc.normalize();
        sign = -1.0;
    }

    int top = kLimbs - 1;
    while (top >= 0 && acc.limbs_[top] == 0) --top;
    if (top < 0) return 0.0;

    auto digit = [&](int i) -> u128 {
        return i >= 0 ? static_cast<u128>(acc.limbs_[i]) : 0;
    };
    u128 window = (digit(top) << 64) | (digit(top - 1) << 32) | digit(top - 2);
    bool sticky = false;
    for (int i = top - 3; i >= 0 && !sticky; --i) sticky = acc.limbs_[i] != 0;

    const auto hi = static_cast<std::uint64_t>(window >> 64);
    const auto lo = static_cast<std::uint64_t>(window);
    const int bitlen = hi != 0 ? 128 - std::countl_zero(hi) : 64 - std::countl_zero(lo);
    int shift = 0;
    if (bitlen > 64) {
        shift = bitlen - 64;
        const u128 dropped = window & ((static_cast<u128>(1) << shift) - 1);
        sticky = sticky || dropped != 0;
        window >>= shift;
    }
    auto bits = static_cast<std::uint64_t>(window);
    if (sticky) bits |= 1u;
    const int lsb = 32 * (top - 2) - kBias + shift;
    return sign * std::ldexp(static_cast<double>(bits), lsb);
}

double exact_sum(std::span<const double> values) {
    ExactAccumulator acc;
    for (double x : values) acc.add(x);
    return acc.result();
}

}  // namespace csgs
