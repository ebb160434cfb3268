#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace csgs {

// Accumulates doubles into a wide fixed-point register without rounding.
// result() is the correctly rounded value of the exact sum, so it does not
// depend on the order in which terms were added. Quadrature relies on this:
// permuting grid samples (lattice translations, reversed loops, threaded
// partial sums merged in any order) leaves every integral bit-identical.
class ExactAccumulator {
public:
    void add(double x);
    void merge(const ExactAccumulator& other);
    [[nodiscard]] double result() const;

private:
    // 32-bit digits stored in int64 so carries can be deferred.
    static constexpr int kLimbs = 72;
    static constexpr int kBias = 1184;  // bit index of 2^0; covers subnormals
    static constexpr std::size_t kMaxPending = std::size_t{1} << 30;

    void normalize();

    std::array<std::int64_t, kLimbs> limbs_{};
    std::size_t pending_ = 0;
    double special_ = 0.0;  // sum of non-finite inputs
    bool has_special_ = false;
};

/// Correctly rounded sum of the values.
double exact_sum(std::span<const double> values);

}  // namespace csgs
