// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "memwalk/kernel.hpp"
#include "memwalk/rng.hpp"

namespace memwalk {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// One realisation of the memorised walk: the retained times S (strictly
/// increasing, all > 0) and the Brownian location at each time. The origin
/// (t=0, position (0,0)) is implicit and not stored.
struct MemorySet {
    std::vector<double> times;
    std::vector<Point2> locations;
    /// Set when sampling stopped at the survival floor rather than by the
    /// natural termination event.
    bool truncated = false;
};

struct SamplerOptions {
    /// Arrivals beyond the time where survival(t) drops below this floor are
    /// dropped (and the memory set flagged as truncated). Keeps the numeric
    /// inverse-CDF well away from the underflow regime of fat-tailed kernels.
    double survival_floor = 1e-15;
};

/// Next arrival of the Poisson process with intensity c*mu(t) after time tau,
/// driven by the uniform variate u. Returns nothing when u >= p(tau), the
/// probability of any arrival in (tau, inf): that event means tau was the
/// last retained time.
inline std::optional<double> next_arrival(const Kernel& kernel, double c, double tau, double u) {
    if (!(c > 0.0)) throw std::invalid_argument("next_arrival: requires c > 0");
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("next_arrival: requires 0 <= u < 1");
    if (!(tau >= 0.0)) throw std::invalid_argument("next_arrival: requires tau >= 0");

    const double s_tau = kernel.survival(tau);
    if (s_tau <= 0.0) return std::nullopt;
    // u < p(tau) = 1 - exp(-c*s_tau) is equivalent to -log(1-u) < c*s_tau.
    const double exp_gap = -std::log1p(-u);
    if (exp_gap >= c * s_tau) return std::nullopt;
    const double s_next = s_tau - exp_gap / c;
    double t = kernel.inverse_survival(s_next, tau);
    if (t <= tau) t = std::nextafter(tau, std::numeric_limits<double>::infinity());
    return t;
}

namespace detail {

inline std::vector<double> sample_times_impl(const Kernel& kernel, double c, Rng& rng,
                                             const SamplerOptions& options, bool& truncated) {
    std::vector<double> times;
    truncated = false;
    // Survival-space state: s_n = survival(Z_n). Each step subtracts an
    // Exp(1)/c gap; termination is the gap overshooting the remaining mass.
    double s = 1.0;
    double prev_t = 0.0;
    while (true) {
        const double exp_gap = -std::log(rng.uniform01_open());
        if (exp_gap >= c * s) break;
        s -= exp_gap / c;
        if (s < options.survival_floor) {
            truncated = true;
            break;
        }
        double t = kernel.inverse_survival(s, prev_t);
        if (t <= prev_t) t = std::nextafter(prev_t, std::numeric_limits<double>::infinity());
        times.push_back(t);
        prev_t = t;
    }
    return times;
}

} // namespace detail

/// All retained times of one replica, in increasing order (possibly empty).
inline std::vector<double> sample_memory_times(const Kernel& kernel, double c, RngStream stream,
                                               const SamplerOptions& options = {}) {
    if (!(c > 0.0)) throw std::invalid_argument("sample_memory_times: requires c > 0");
    Rng rng(stream);
    bool truncated = false;
    return detail::sample_times_impl(kernel, c, rng, options, truncated);
}

/// A full memory set: times plus Brownian locations accumulated with
/// independent N(0, dt) increments per coordinate from the origin.
inline MemorySet sample_memory_set(const Kernel& kernel, double c, RngStream stream,
                                   const SamplerOptions& options = {}) {
    if (!(c > 0.0)) throw std::invalid_argument("sample_memory_set: requires c > 0");
    Rng rng(stream);
    MemorySet set;
    set.times = detail::sample_times_impl(kernel, c, rng, options, set.truncated);
    set.locations.resize(set.times.size());
    double prev_t = 0.0, x = 0.0, y = 0.0;
    for (std::size_t i = 0; i < set.times.size(); ++i) {
        const double sd = std::sqrt(set.times[i] - prev_t);
        x += sd * rng.normal();
        y += sd * rng.normal();
        set.locations[i] = {x, y};
        prev_t = set.times[i];
    }
    return set;
}

/// Exact moments of sum_{t in S} t^m over the Poisson process with intensity
/// c*mu(t): order 1 gives c*E[t^m]; order 2 gives (c*E[t^m])^2 + c*E[t^(2m)].
inline double campbell_moment_oracle(const Kernel& kernel, double c, int power_m,
                                     int moment_order) {
    if (!(c > 0.0)) throw std::invalid_argument("campbell_moment_oracle: requires c > 0");
    if (power_m < 0) throw std::invalid_argument("campbell_moment_oracle: requires power_m >= 0");
    if (moment_order != 1 && moment_order != 2)
        throw std::invalid_argument("campbell_moment_oracle: moment_order must be 1 or 2");
    const double first = c * kernel.raw_moment(power_m);
    if (moment_order == 1) return first;
    return first * first + c * kernel.raw_moment(2 * power_m);
}

} // namespace memwalk
