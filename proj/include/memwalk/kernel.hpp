// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "memwalk/special_functions.hpp"

namespace memwalk {

enum class KernelFamily {
    uniform,
    half_normal,
    exponential,
    stretched_exponential,
    lomax,
};

inline const char* family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::uniform: return "uniform";
        case KernelFamily::half_normal: return "halfnormal";
        case KernelFamily::exponential: return "exponential";
        case KernelFamily::stretched_exponential: return "stretched";
        case KernelFamily::lomax: return "lomax";
    }
    return "?";
}

/// A memory kernel: a non-increasing probability density on [0, inf) with
/// finite first moment, together with its CDF, survival function, inverse
/// CDF and moments. Immutable after construction; safe to share across threads.
class Kernel {
public:
    static Kernel uniform(double r) { return Kernel(KernelFamily::uniform, r, 0.0); }
    static Kernel half_normal() { return Kernel(KernelFamily::half_normal, 0.0, 0.0); }
    static Kernel exponential(double rate) { return Kernel(KernelFamily::exponential, rate, 0.0); }
    static Kernel stretched(double exponent) {
        return Kernel(KernelFamily::stretched_exponential, exponent, 0.0);
    }
    static Kernel lomax(double shape, double scale = 1.0) {
        return Kernel(KernelFamily::lomax, shape, scale);
    }

    /// Parses the kernel spec grammar:
    ///   uniform:r=<f> | halfnormal | exponential:lambda=<f>
    ///   | stretched:a=<f> | lomax:a=<f>,scale=<f>
    /// Omitted keys take defaults r=1, lambda=1, scale=1.
    static Kernel parse(std::string_view spec);

    KernelFamily family() const { return family_; }

    /// Shape parameter: r (uniform), lambda (exponential), a (stretched, lomax).
    double shape_param() const { return p1_; }
    /// Scale parameter (lomax only).
    double scale_param() const { return p2_; }

    std::string to_string() const;

    /// Density mu(t); zero outside the support.
    double density(double t) const {
        require_time(t);
        switch (family_) {
            case KernelFamily::uniform: return t < p1_ ? 1.0 / p1_ : 0.0;
            case KernelFamily::half_normal:
                return std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * t * t);
            case KernelFamily::exponential: return p1_ * std::exp(-p1_ * t);
            case KernelFamily::stretched_exponential:
                return p1_ * inv_gamma_s_ * std::exp(-std::pow(t, p1_));
            case KernelFamily::lomax:
                return (p1_ / p2_) * std::exp(-(p1_ + 1.0) * std::log1p(t / p2_));
        }
        return 0.0;
    }

    /// Cumulative M(t) = integral of mu over [0,t].
    double cumulative(double t) const {
        require_time(t);
        switch (family_) {
            case KernelFamily::uniform: return t < p1_ ? t / p1_ : 1.0;
            case KernelFamily::half_normal: return std::erf(t / std::numbers::sqrt2);
            case KernelFamily::exponential: return -std::expm1(-p1_ * t);
            case KernelFamily::stretched_exponential:
                return special::regularized_lower_gamma(1.0 / p1_, std::pow(t, p1_));
            case KernelFamily::lomax: return -std::expm1(-p1_ * std::log1p(t / p2_));
        }
        return 0.0;
    }

    /// Survival 1 - M(t), computed from the exact tail formula of each family
    /// (never as 1 - cumulative).
    double survival(double t) const {
        require_time(t);
        switch (family_) {
            case KernelFamily::uniform: return t < p1_ ? 1.0 - t / p1_ : 0.0;
            case KernelFamily::half_normal: return std::erfc(t / std::numbers::sqrt2);
            case KernelFamily::exponential: return std::exp(-p1_ * t);
            case KernelFamily::stretched_exponential:
                return special::regularized_upper_gamma(1.0 / p1_, std::pow(t, p1_));
            case KernelFamily::lomax: return std::exp(-p1_ * std::log1p(t / p2_));
        }
        return 0.0;
    }

    /// Inverse CDF: the t with M(t) = u, for u in [0,1). Closed form where the
    /// family has one; bisection otherwise.
    double inverse_cumulative(double u) const {
        if (!(u >= 0.0 && u < 1.0))
            throw std::domain_error("inverse_cumulative: requires 0 <= u < 1");
        if (u == 0.0) return 0.0;
        switch (family_) {
            case KernelFamily::uniform: return u * p1_;
            case KernelFamily::exponential: return -std::log1p(-u) / p1_;
            case KernelFamily::lomax: return p2_ * std::expm1(-std::log1p(-u) / p1_);
            default: break;
        }
        if (u <= 0.5) return bisect_cumulative(u);
        return inverse_survival(1.0 - u, 0.0);
    }

    /// Inverse survival: the t > lo_hint with survival(t) = s, for s in (0,1].
    /// lo_hint must satisfy survival(lo_hint) >= s; used by the sampler to
    /// bracket from the previous arrival.
    double inverse_survival(double s, double lo_hint = 0.0) const {
        if (!(s > 0.0 && s <= 1.0))
            throw std::domain_error("inverse_survival: requires 0 < s <= 1");
        if (s == 1.0) return 0.0;
        switch (family_) {
            case KernelFamily::uniform: return p1_ * (1.0 - s);
            case KernelFamily::exponential: return -std::log(s) / p1_;
            case KernelFamily::lomax: return p2_ * std::expm1(-std::log(s) / p1_);
            default: break;
        }
        return bisect_survival(s, lo_hint);
    }

    /// First moment of the kernel (finite by construction).
    double first_moment() const { return first_moment_; }

    /// Raw moment E[t^order]; throws if the tail makes it divergent.
    double raw_moment(int order) const {
        if (order < 0) throw std::domain_error("raw_moment: order must be >= 0");
        if (order == 0) return 1.0;
        const double k = order;
        switch (family_) {
            case KernelFamily::uniform: return std::pow(p1_, k) / (k + 1.0);
            case KernelFamily::half_normal:
                return std::sqrt(2.0 / std::numbers::pi) * std::pow(2.0, 0.5 * (k - 1.0)) *
                       std::tgamma(0.5 * (k + 1.0));
            case KernelFamily::exponential: return std::tgamma(k + 1.0) / std::pow(p1_, k);
            case KernelFamily::stretched_exponential:
                return std::exp(std::lgamma((k + 1.0) / p1_) - std::lgamma(1.0 / p1_));
            case KernelFamily::lomax: {
                if (p1_ <= k)
                    throw std::domain_error("raw_moment: lomax moment of order " +
                                            std::to_string(order) + " diverges for a <= order");
                double denom = 1.0;
                for (int i = 1; i <= order; ++i) denom *= (p1_ - i);
                return std::pow(p2_, k) * std::tgamma(k + 1.0) / denom;
            }
        }
        return 0.0;
    }

    /// End of the density's support (+inf except for the uniform family).
    double support_end() const {
        return family_ == KernelFamily::uniform ? p1_
                                                : std::numeric_limits<double>::infinity();
    }

private:
    Kernel(KernelFamily family, double p1, double p2) : family_(family), p1_(p1), p2_(p2) {
        validate();
        switch (family_) {
            case KernelFamily::uniform: first_moment_ = 0.5 * p1_; break;
            case KernelFamily::half_normal:
                first_moment_ = std::sqrt(2.0 / std::numbers::pi);
                break;
            case KernelFamily::exponential: first_moment_ = 1.0 / p1_; break;
            case KernelFamily::stretched_exponential:
                inv_gamma_s_ = std::exp(-std::lgamma(1.0 / p1_));
                first_moment_ = std::exp(std::lgamma(2.0 / p1_) - std::lgamma(1.0 / p1_));
                break;
            case KernelFamily::lomax: first_moment_ = p2_ / (p1_ - 1.0); break;
        }
    }

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument(std::string("kernel parameter ") + name +
                                            " must be positive and finite");
        };
        switch (family_) {
            case KernelFamily::uniform: positive(p1_, "r"); break;
            case KernelFamily::half_normal: break;
            case KernelFamily::exponential: positive(p1_, "lambda"); break;
            case KernelFamily::stretched_exponential: positive(p1_, "a"); break;
            case KernelFamily::lomax:
                positive(p1_, "a");
                positive(p2_, "scale");
                if (p1_ <= 1.0)
                    throw std::invalid_argument(
                        "lomax kernel requires a > 1: first moment must be finite");
                break;
        }
    }

    static void require_time(double t) {
        if (!(t >= 0.0)) throw std::domain_error("kernel evaluated at negative time");
    }

    double bisect_cumulative(double u) const {
        double lo = 0.0;
        double hi = std::max(first_moment_, 1e-30);
        for (int i = 0; i < 200 && cumulative(hi) < u; ++i) hi *= 2.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (cumulative(mid) < u ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    double bisect_survival(double s, double lo_hint) const {
        double lo = lo_hint;
        double step = std::max(first_moment_, 0.5 * lo_hint);
        double hi = lo + step;
        for (int i = 0; i < 200 && survival(hi) > s; ++i) {
            lo = hi;
            step *= 2.0;
            hi = lo + step;
        }
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (survival(mid) > s ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    KernelFamily family_;
    double p1_ = 0.0;
    double p2_ = 0.0;
    double first_moment_ = 0.0;
    double inv_gamma_s_ = 0.0;
};

namespace detail {

inline double parse_real(std::string_view text, std::string_view key) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw std::invalid_argument("kernel spec: bad numeric value for '" + std::string(key) +
                                    "': '" + std::string(text) + "'");
    return value;
}

} // namespace detail

inline Kernel Kernel::parse(std::string_view spec) {
    std::string_view fam = spec;
    std::string_view params;
    if (const auto colon = spec.find(':'); colon != std::string_view::npos) {
        fam = spec.substr(0, colon);
        params = spec.substr(colon + 1);
    }

    KernelFamily family;
    if (fam == "uniform") family = KernelFamily::uniform;
    else if (fam == "halfnormal") family = KernelFamily::half_normal;
    else if (fam == "exponential") family = KernelFamily::exponential;
    else if (fam == "stretched") family = KernelFamily::stretched_exponential;
    else if (fam == "lomax") family = KernelFamily::lomax;
    else throw std::invalid_argument("unknown kernel family: '" + std::string(fam) + "'");

    std::optional<double> r, lambda, a, scale;
    while (!params.empty()) {
        const auto comma = params.find(',');
        const std::string_view item =
            comma == std::string_view::npos ? params : params.substr(0, comma);
        params = comma == std::string_view::npos ? std::string_view{} : params.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw std::invalid_argument("kernel spec: expected key=value, got '" +
                                        std::string(item) + "'");
        const std::string_view key = item.substr(0, eq);
        const double value = detail::parse_real(item.substr(eq + 1), key);

        const bool known =
            (family == KernelFamily::uniform && key == "r") ||
            (family == KernelFamily::exponential && key == "lambda") ||
            (family == KernelFamily::stretched_exponential && key == "a") ||
            (family == KernelFamily::lomax && (key == "a" || key == "scale"));
        if (!known)
            throw std::invalid_argument("kernel spec: unknown key '" + std::string(key) +
                                        "' for family " + family_name(family));
        if (key == "r") r = value;
        else if (key == "lambda") lambda = value;
        else if (key == "a") a = value;
        else scale = value;
    }

    switch (family) {
        case KernelFamily::uniform: return Kernel::uniform(r.value_or(1.0));
        case KernelFamily::half_normal: return Kernel::half_normal();
        case KernelFamily::exponential: return Kernel::exponential(lambda.value_or(1.0));
        case KernelFamily::stretched_exponential:
            if (!a) throw std::invalid_argument("kernel spec: stretched requires a=<f>");
            return Kernel::stretched(*a);
        case KernelFamily::lomax:
            if (!a) throw std::invalid_argument("kernel spec: lomax requires a=<f>");
            return Kernel::lomax(*a, scale.value_or(1.0));
    }
    throw std::invalid_argument("unreachable kernel family");
}

inline std::string Kernel::to_string() const {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return std::string(buf);
    };
    switch (family_) {
        case KernelFamily::uniform: return "uniform:r=" + fmt(p1_);
        case KernelFamily::half_normal: return "halfnormal";
        case KernelFamily::exponential: return "exponential:lambda=" + fmt(p1_);
        case KernelFamily::stretched_exponential: return "stretched:a=" + fmt(p1_);
        case KernelFamily::lomax: return "lomax:a=" + fmt(p1_) + ",scale=" + fmt(p2_);
    }
    return "?";
}

} // namespace memwalk
