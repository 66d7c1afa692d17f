#include "topoflock/rational.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "topoflock/error.hpp"

namespace topoflock {

Fraction best_rational(double x, std::int64_t max_den)
{
    if (max_den < 1)
        throw Error(ErrorCode::InvalidParams, "max_den must be positive");
    if (!std::isfinite(x))
        throw Error(ErrorCode::InvalidParams, "cannot approximate a non-finite value");

    const bool negative = x < 0.0;
    const long double target = std::abs(static_cast<long double>(x));

    // h/k are the convergents; (h0,k0) the previous one.
    std::int64_t h0 = 0, k0 = 1, h1 = 1, k1 = 0;
    long double y = target;
    Fraction best{static_cast<std::int64_t>(std::floor(target)), 1};

    for (int iter = 0; iter < 64; ++iter) {
        const long double fl = std::floor(y);
        if (fl > 9.0e18L)
            break;
        const auto a = static_cast<std::int64_t>(fl);
        const long double k2l = static_cast<long double>(a) * k1 + k0;
        if (k2l > static_cast<long double>(max_den)) {
            // Largest semiconvergent that respects the bound.
            const std::int64_t t = (max_den - k0) / k1;
            if (t > 0) {
                const Fraction semi{t * h1 + h0, t * k1 + k0};
                const long double err_semi =
                    std::abs(static_cast<long double>(semi.num) / semi.den - target);
                const long double err_conv =
                    std::abs(static_cast<long double>(h1) / k1 - target);
                if (err_semi < err_conv)
                    best = semi;
            }
            break;
        }
        const std::int64_t h2 = a * h1 + h0;
        const auto k2 = static_cast<std::int64_t>(k2l);
        h0 = h1;
        k0 = k1;
        h1 = h2;
        k1 = k2;
        best = {h1, k1};

        const long double frac = y - fl;
        if (frac <= 0.0L || std::abs(static_cast<long double>(h1) / k1 - target) == 0.0L)
            break;
        y = 1.0L / frac;
    }

    const std::int64_t g = std::gcd(best.num, best.den);
    if (g > 1) {
        best.num /= g;
        best.den /= g;
    }
    if (negative)
        best.num = -best.num;
    return best;
}

std::optional<Fraction> rational_within(double x, double tol, std::int64_t max_den)
{
    const Fraction f = best_rational(x, max_den);
    if (std::abs(f.value() - x) <= tol)
        return f;
    return std::nullopt;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out))
        throw Error(ErrorCode::ArithmeticOverflow, "integer overflow in " + std::to_string(a) + " * " + std::to_string(b));
    return out;
}

std::int64_t checked_lcm(std::int64_t a, std::int64_t b)
{
    if (a == 0 || b == 0)
        return 0;
    a = std::abs(a);
    b = std::abs(b);
    return checked_mul(a / std::gcd(a, b), b);
}

} // namespace topoflock
