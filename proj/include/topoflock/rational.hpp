#pragma once

#include <cstdint>
#include <optional>

namespace topoflock {

/// Reduced fraction with positive denominator.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Closest fraction to x with denominator at most max_den, from the continued
/// fraction convergents and the last admissible semiconvergent.
Fraction best_rational(double x, std::int64_t max_den);

/// best_rational(x, max_den) if it lies within tol of x, otherwise nullopt.
std::optional<Fraction> rational_within(double x, double tol, std::int64_t max_den);

/// Overflow-checked integer helpers; throw ArithmeticOverflow.
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_lcm(std::int64_t a, std::int64_t b);

} // namespace topoflock
