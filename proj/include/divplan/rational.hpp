#pragma once

#include <cstdint>
#include <numeric>

#include "divplan/errors.hpp"

namespace divplan {

/// Exact non-negative rational on int64, always kept reduced.
/// Used for samples-per-class n = N/K and the ratio x = K^2/N, so that
/// K = x*n and N = K*n hold exactly even when K does not divide N.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den == 0) fail(errc::domain, "rational with zero denominator");
        if (num < 0 || den < 0) fail(errc::domain, "rational must be non-negative");
        const std::int64_t g = std::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }

    friend Rational operator*(const Rational& a, const Rational& b) {
        // cross-reduce first so K*n = N stays exact well past dataset sizes
        const std::int64_t g1 = std::gcd(a.num, b.den);
        const std::int64_t g2 = std::gcd(b.num, a.den);
        return Rational((a.num / g1) * (b.num / g2), (a.den / g2) * (b.den / g1));
    }
};

}  // namespace divplan
