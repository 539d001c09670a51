// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "memwalk/kernel.hpp"
#include "memwalk/quadrature.hpp"

namespace memwalk {

class TheoryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The four primitive integrals of the asphericity formulas at horizon tau,
/// plus M(tau):
///   i1 = int_0^tau s mu(s) ds        i2 = int_0^tau M(s) ds
///   i3 = int_0^tau s M(s) ds         i4 = int_0^tau s M(s)^2 ds
struct PrimitiveIntegrals {
    double tau = 0.0;
    double i1 = 0.0;
    double i2 = 0.0;
    double i3 = 0.0;
    double i4 = 0.0;
    double m_tau = 0.0;
};

struct TheoryResult {
    double a2 = 0.0;
    double alpha_limit = 0.0;
    double beta_limit = 0.0;
    double tau_used = 0.0;
    double rel_change_last_doubling = 0.0;
};

namespace theory_detail {

// Survival-side integrals. With S = 1 - M these carry the whole finite-tau
// content of the asphericity formulas without the O(tau^2) cancellations of
// the direct expansion:
//   q0 = int_0^tau S(s) ds
//   q1 = int_0^tau s S(s) ds
//   q3 = int_0^tau s S(s)^2 ds
//   g  = S(tau)
struct SurvivalIntegrals {
    double q0 = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double g = 0.0;
};

// 1 - exp(-x)*(1+x), series-stable near zero.
inline double one_minus_exp_linear(double x) {
    if (x > 1e-3) return 1.0 - std::exp(-x) * (1.0 + x);
    const double x2 = x * x;
    return x2 * (0.5 - x / 3.0 + x2 / 8.0 - x2 * x / 30.0 + x2 * x2 / 144.0);
}

// int_1^w v^p dv, stable through p = -1.
inline double power_integral(double p, double w) {
    const double q = p + 1.0;
    const double lw = std::log(w);
    if (std::abs(q * lw) < 1e-8) return lw * (1.0 + 0.5 * q * lw);
    return std::expm1(q * lw) / q;
}

inline SurvivalIntegrals survival_integrals(const Kernel& k, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("survival integrals require tau > 0");
    SurvivalIntegrals si;
    si.g = k.survival(tau);
    switch (k.family()) {
        case KernelFamily::uniform: {
            const double r = k.shape_param();
            if (tau >= r) {
                si.q0 = 0.5 * r;
                si.q1 = r * r / 6.0;
                si.q3 = r * r / 12.0;
            } else {
                const double t2 = tau * tau;
                si.q0 = tau - 0.5 * t2 / r;
                si.q1 = 0.5 * t2 - t2 * tau / (3.0 * r);
                si.q3 = 0.5 * t2 - 2.0 * t2 * tau / (3.0 * r) + t2 * t2 / (4.0 * r * r);
            }
            return si;
        }
        case KernelFamily::exponential: {
            const double lam = k.shape_param();
            const double x = lam * tau;
            si.q0 = -std::expm1(-x) / lam;
            si.q1 = one_minus_exp_linear(x) / (lam * lam);
            si.q3 = one_minus_exp_linear(2.0 * x) / (4.0 * lam * lam);
            return si;
        }
        case KernelFamily::lomax: {
            const double a = k.shape_param();
            const double scale = k.scale_param();
            const double w = 1.0 + tau / scale;
            si.q0 = scale * power_integral(-a, w);
            si.q1 = scale * scale * (power_integral(1.0 - a, w) - power_integral(-a, w));
            si.q3 = scale * scale * (power_integral(1.0 - 2.0 * a, w) - power_integral(-2.0 * a, w));
            return si;
        }
        default: break;
    }
    // half-normal, stretched exponential: adaptive quadrature of the
    // survival-side integrands (smooth, non-negative, light tails).
    auto surv = [&k](double s) { return k.survival(s); };
    si.q0 = quad::integrate([&](double s) { return surv(s); }, 0.0, tau).value;
    si.q1 = quad::integrate([&](double s) { return s * surv(s); }, 0.0, tau).value;
    si.q3 = quad::integrate(
                [&](double s) {
                    const double v = surv(s);
                    return s * v * v;
                },
                0.0, tau)
                .value;
    return si;
}

// q3 at tau = infinity where the family admits a closed form.
inline std::optional<double> q3_limit_closed(const Kernel& k) {
    switch (k.family()) {
        case KernelFamily::uniform: {
            const double r = k.shape_param();
            return r * r / 12.0;
        }
        case KernelFamily::exponential: {
            const double lam = k.shape_param();
            return 1.0 / (4.0 * lam * lam);
        }
        case KernelFamily::lomax: {
            const double a = k.shape_param();
            const double scale = k.scale_param();
            return scale * scale / ((2.0 * a - 2.0) * (2.0 * a - 1.0));
        }
        default: return std::nullopt;
    }
}

inline double alpha_from(const SurvivalIntegrals& si, double tau) {
    const double i1 = si.q0 - tau * si.g;
    const double tg = tau * si.g;
    return 0.5 * i1 * i1 + 0.5 * si.q0 * si.q0 - 2.0 * si.q3 +
           si.g * (4.0 * si.q1 - tau * si.q0) - 0.5 * tg * tg;
}

inline double beta_from(const SurvivalIntegrals& si, double tau) {
    const double i1 = si.q0 - tau * si.g;
    const double tg = tau * si.g;
    return 2.0 * i1 * i1 + 2.0 * si.q0 * si.q0 + 8.0 * si.q3 -
           4.0 * si.g * (4.0 * si.q1 + tau * si.q0) + 6.0 * tg * tg;
}

} // namespace theory_detail

inline PrimitiveIntegrals primitive_integrals(const Kernel& k, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("primitive_integrals: requires tau > 0");
    theory_detail::SurvivalIntegrals si;
    try {
        si = theory_detail::survival_integrals(k, tau);
    } catch (const quad::QuadratureError& e) {
        throw TheoryError(std::string("primitive_integrals: ") + e.what());
    }
    PrimitiveIntegrals p;
    p.tau = tau;
    p.m_tau = 1.0 - si.g;
    p.i1 = si.q0 - tau * si.g;
    p.i2 = tau - si.q0;
    p.i3 = 0.5 * tau * tau - si.q1;
    p.i4 = 0.5 * tau * tau - 2.0 * si.q1 + si.q3;
    return p;
}

/// alpha(tau) of the asphericity theorem,
///   alpha = E[T11 T22] - E[T12^2]
/// for the tau-truncated Brownian integrals, evaluated through the
/// survival-side integrals so the O(tau^2) terms cancel algebraically.
inline double alpha(const Kernel& k, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("alpha: requires tau > 0");
    try {
        return theory_detail::alpha_from(theory_detail::survival_integrals(k, tau), tau);
    } catch (const quad::QuadratureError& e) {
        throw TheoryError(std::string("alpha: ") + e.what());
    }
}

/// beta(tau) = E[(T11 + T22)^2] for the tau-truncated Brownian integrals.
inline double beta(const Kernel& k, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("beta: requires tau > 0");
    try {
        return theory_detail::beta_from(theory_detail::survival_integrals(k, tau), tau);
    } catch (const quad::QuadratureError& e) {
        throw TheoryError(std::string("beta: ") + e.what());
    }
}

/// A2 = 1 - 4 lim alpha/beta, evaluated on a tau-doubling ladder.
///
/// In the limit the transient survival terms vanish and
///   alpha -> f^2 - 2 q3,  beta -> 4 f^2 + 8 q3,
/// with f the first moment and q3 = int_0^inf s S(s)^2 ds. The ladder extends
/// q3 (exactly, for families with a closed tail; by accumulating quadrature
/// panels otherwise) until the ratio's relative change stays below rel_tol
/// for two consecutive doublings. Truncating the moment integrals at finite
/// tau instead would converge like tau^{-(a-1)} for Lomax tails, which is
/// unusably slow near a = 1.
inline TheoryResult a2_limit(const Kernel& k, double rel_tol = 1e-8) {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-3))
        throw std::invalid_argument("a2_limit: rel_tol must be in (0, 1e-3]");

    const double f = k.first_moment();
    const double tau0 = 8.0 * f;
    const int max_doublings = 17; // tau cap = 2^20 * first_moment

    const std::optional<double> q3_closed = theory_detail::q3_limit_closed(k);

    double q3 = 0.0;
    double tau = tau0;
    double prev_ratio = -1.0;
    double prev_change = std::numeric_limits<double>::infinity();
    double last_change = std::numeric_limits<double>::infinity();

    auto make_result = [&](double ratio, double change) {
        TheoryResult r;
        r.alpha_limit = f * f - 2.0 * q3;
        r.beta_limit = 4.0 * f * f + 8.0 * q3;
        r.a2 = 1.0 - 4.0 * ratio;
        r.tau_used = tau;
        r.rel_change_last_doubling = change;
        return r;
    };

    try {
        double seg_lo = 0.0;
        for (int step = 0; step <= max_doublings; ++step) {
            if (q3_closed) {
                q3 = *q3_closed;
            } else {
                auto integrand = [&k](double s) {
                    const double v = k.survival(s);
                    return s * v * v;
                };
                q3 += quad::integrate_with_breakpoints(integrand, seg_lo, tau,
                                                       {k.support_end()})
                          .value;
                seg_lo = tau;
            }
            const double ratio = (f * f - 2.0 * q3) / (4.0 * f * f + 8.0 * q3);
            if (prev_ratio >= 0.0) {
                prev_change = last_change;
                last_change = std::abs(ratio - prev_ratio) /
                              std::max(std::abs(prev_ratio), 1e-300);
                if (prev_change < rel_tol && last_change < rel_tol)
                    return make_result(ratio, last_change);
            }
            prev_ratio = ratio;
            if (step < max_doublings) tau *= 2.0;
        }
    } catch (const quad::QuadratureError& e) {
        throw TheoryError(std::string("a2_limit: ") + e.what());
    }
    throw TheoryError("a2_limit: ratio did not stabilise to rel_tol " + std::to_string(rel_tol) +
                      " within tau cap " + std::to_string(tau) +
                      " (last relative change " + std::to_string(last_change) + ")");
}

/// Exact A2 where a closed form is known.
inline std::optional<double> closed_form_a2(const Kernel& k) {
    switch (k.family()) {
        case KernelFamily::uniform: return 4.0 / 5.0;
        case KernelFamily::exponential: return 2.0 / 3.0;
        case KernelFamily::half_normal: return 2.0 - 4.0 / std::numbers::pi;
        case KernelFamily::lomax: {
            const double a = k.shape_param();
            return 2.0 * (a - 1.0) / (3.0 * a - 2.0);
        }
        case KernelFamily::stretched_exponential: {
            const double a = k.shape_param();
            if (a == 0.5) return 10.0 / 17.0;
            if (a == 0.25) return 594.0 / 1193.0;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

enum class TensorMoment { e_t11, e_t11_sq, e_t12_sq };

/// Exact first/second moments of the tau-truncated gyration-tensor entries:
///   E[T11(tau)], E[T11(tau)^2], E[T12(tau)^2].
inline double tensor_moment_oracle(const Kernel& k, double tau, TensorMoment which) {
    if (!(tau > 0.0)) throw std::invalid_argument("tensor_moment_oracle: requires tau > 0");
    theory_detail::SurvivalIntegrals si;
    try {
        si = theory_detail::survival_integrals(k, tau);
    } catch (const quad::QuadratureError& e) {
        throw TheoryError(std::string("tensor_moment_oracle: ") + e.what());
    }
    const double i1 = si.q0 - tau * si.g;
    const double tg = tau * si.g;
    switch (which) {
        case TensorMoment::e_t11: return i1;
        case TensorMoment::e_t11_sq:
            return si.q0 * si.q0 + 4.0 * si.q3 - 8.0 * si.g * si.q1 - 2.0 * tg * si.q0 +
                   3.0 * tg * tg;
        case TensorMoment::e_t12_sq:
            return 0.5 * i1 * i1 - 0.5 * si.q0 * si.q0 + 2.0 * si.q3 - 4.0 * si.g * si.q1 +
                   tg * si.q0 + 0.5 * tg * tg;
    }
    throw std::invalid_argument("tensor_moment_oracle: unknown moment");
}

} // namespace memwalk
