// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace memwalk::special {

namespace detail {

// P(s,x) by power series, valid and fast for x < s+1.
inline double lower_gamma_series(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n < 600; ++n) {
        term *= x / (s + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) {
            return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
        }
    }
    throw std::runtime_error("regularized_lower_gamma: series failed to converge");
}

// Q(s,x) by modified Lentz continued fraction, valid for x >= s+1.
inline double upper_gamma_cf(double s, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 600; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) {
            return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
        }
    }
    throw std::runtime_error("regularized_upper_gamma: continued fraction failed to converge");
}

} // namespace detail

/// Regularized lower incomplete gamma P(s,x) = gamma(s,x)/Gamma(s).
inline double regularized_lower_gamma(double s, double x) {
    if (!(s > 0.0)) throw std::domain_error("regularized_lower_gamma: requires s > 0");
    if (!(x >= 0.0)) throw std::domain_error("regularized_lower_gamma: requires x >= 0");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return detail::lower_gamma_series(s, x);
    return 1.0 - detail::upper_gamma_cf(s, x);
}

/// Regularized upper incomplete gamma Q(s,x) = 1 - P(s,x), computed directly in the tail.
inline double regularized_upper_gamma(double s, double x) {
    if (!(s > 0.0)) throw std::domain_error("regularized_upper_gamma: requires s > 0");
    if (!(x >= 0.0)) throw std::domain_error("regularized_upper_gamma: requires x >= 0");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) return 1.0 - detail::lower_gamma_series(s, x);
    return detail::upper_gamma_cf(s, x);
}

} // namespace memwalk::special
