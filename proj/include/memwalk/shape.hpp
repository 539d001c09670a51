// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "memwalk/sampler.hpp"

namespace memwalk {

/// Egocentric gyration tensor: second moments of the memorised locations
/// about the walker's current position (the origin), normalised by 1+|S|.
struct GyrationTensor {
    double t11 = 0.0;
    double t12 = 0.0;
    double t22 = 0.0;
    std::size_t n_points = 0;
};

struct EigenDecomposition {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double theta = 0.0; ///< major-axis angle in [0, pi)
};

struct EllipseParams {
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double angle_theta = 0.0;
};

struct AsphericityEstimate {
    double a2_hat = 0.0;
    double std_error = 0.0;
    std::size_t replicas = 0;
    double mean_num = 0.0; ///< mean over replicas of (lambda1-lambda2)^2
    double mean_den = 0.0; ///< mean over replicas of (lambda1+lambda2)^2
};

enum class StdErrorMethod { delta, jackknife };

inline GyrationTensor gyration_tensor(const MemorySet& set) {
    GyrationTensor t;
    t.n_points = set.locations.size();
    for (const Point2& p : set.locations) {
        t.t11 += p.x * p.x;
        t.t12 += p.x * p.y;
        t.t22 += p.y * p.y;
    }
    // The origin contributes zeros to the sums but counts in the denominator.
    const double norm = 1.0 / (1.0 + static_cast<double>(t.n_points));
    t.t11 *= norm;
    t.t12 *= norm;
    t.t22 *= norm;
    return t;
}

/// Closed-form 2x2 symmetric eigendecomposition. lambda1 >= lambda2;
/// theta = atan2(2*t12, t11-t22)/2 normalised to [0, pi), with theta = 0 at
/// the isotropic tie lambda1 = lambda2.
inline EigenDecomposition eigen_decomposition(const GyrationTensor& t) {
    EigenDecomposition e;
    const double trace = t.t11 + t.t22;
    const double diff = t.t11 - t.t22;
    const double disc = std::hypot(diff, 2.0 * t.t12);
    e.lambda1 = 0.5 * (trace + disc);
    e.lambda2 = 0.5 * (trace - disc);
    e.theta = (t.t12 == 0.0 && diff == 0.0) ? 0.0 : 0.5 * std::atan2(2.0 * t.t12, diff);
    if (e.theta < 0.0) e.theta += std::numbers::pi;
    if (e.theta >= std::numbers::pi) e.theta -= std::numbers::pi;
    return e;
}

/// Ellipse v^T T^{-1} v = kappa^2: semi-axes kappa*sqrt(lambda_i).
inline EllipseParams ellipse(const GyrationTensor& t, double kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("ellipse: requires kappa > 0");
    const EigenDecomposition e = eigen_decomposition(t);
    return {kappa * std::sqrt(std::max(e.lambda1, 0.0)),
            kappa * std::sqrt(std::max(e.lambda2, 0.0)), e.theta};
}

/// Asphericity estimator over replicas: the ratio of means
/// E[(lambda1-lambda2)^2] / E[(lambda1+lambda2)^2] (never the mean of
/// per-replica ratios). The numerator is accumulated as (t11-t22)^2 + 4*t12^2
/// to avoid cancellation between near-equal eigenvalues.
inline AsphericityEstimate asphericity_estimate(std::span<const GyrationTensor> tensors,
                                                StdErrorMethod method = StdErrorMethod::delta) {
    if (tensors.empty()) throw std::invalid_argument("asphericity_estimate: empty replica list");
    const std::size_t n = tensors.size();

    double sum_num = 0.0, sum_den = 0.0;
    for (const GyrationTensor& t : tensors) {
        const double diff = t.t11 - t.t22;
        sum_num += diff * diff + 4.0 * t.t12 * t.t12;
        const double trace = t.t11 + t.t22;
        sum_den += trace * trace;
    }
    if (sum_den == 0.0)
        throw std::domain_error("asphericity_estimate: all replicas have zero extent");

    AsphericityEstimate est;
    est.replicas = n;
    est.mean_num = sum_num / static_cast<double>(n);
    est.mean_den = sum_den / static_cast<double>(n);
    est.a2_hat = est.mean_num / est.mean_den;
    if (n < 2) return est;

    if (method == StdErrorMethod::delta) {
        // Var(num_i - a2*den_i) / (n * mean_den^2)
        double vnn = 0.0, vdd = 0.0, vnd = 0.0;
        for (const GyrationTensor& t : tensors) {
            const double diff = t.t11 - t.t22;
            const double trace = t.t11 + t.t22;
            const double dn = diff * diff + 4.0 * t.t12 * t.t12 - est.mean_num;
            const double dd = trace * trace - est.mean_den;
            vnn += dn * dn;
            vdd += dd * dd;
            vnd += dn * dd;
        }
        const double scale = 1.0 / static_cast<double>(n - 1);
        vnn *= scale;
        vdd *= scale;
        vnd *= scale;
        const double var =
            (vnn - 2.0 * est.a2_hat * vnd + est.a2_hat * est.a2_hat * vdd) /
            (static_cast<double>(n) * est.mean_den * est.mean_den);
        est.std_error = std::sqrt(std::max(var, 0.0));
    } else {
        // Jackknife over leave-one-out ratios.
        double mean_loo = 0.0;
        std::vector<double> loo(n);
        for (std::size_t i = 0; i < n; ++i) {
            const GyrationTensor& t = tensors[i];
            const double diff = t.t11 - t.t22;
            const double trace = t.t11 + t.t22;
            const double num_i = diff * diff + 4.0 * t.t12 * t.t12;
            const double den_i = trace * trace;
            loo[i] = (sum_num - num_i) / (sum_den - den_i);
            mean_loo += loo[i];
        }
        mean_loo /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
        est.std_error = std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return est;
}

/// Rotates a memory set so the major axis of its egocentric gyration tensor
/// is horizontal and the centre of mass has non-negative x. The returned
/// cloud starts with the (fixed) origin, followed by the rotated locations.
inline std::vector<Point2> align_for_density(const MemorySet& set) {
    if (set.locations.size() < 2)
        throw std::invalid_argument("align_for_density: needs at least 2 memorised points");
    const EigenDecomposition e = eigen_decomposition(gyration_tensor(set));
    const double c = std::cos(e.theta);
    const double s = std::sin(e.theta);

    std::vector<Point2> out;
    out.reserve(set.locations.size() + 1);
    out.push_back({0.0, 0.0});
    double com_x = 0.0;
    for (const Point2& p : set.locations) {
        // R(-theta) * p
        const Point2 q{p.x * c + p.y * s, -p.x * s + p.y * c};
        com_x += q.x;
        out.push_back(q);
    }
    if (com_x < 0.0) {
        for (Point2& q : out) {
            // 0.0 - x rather than -x keeps the origin at +0.0
            q.x = 0.0 - q.x;
            q.y = 0.0 - q.y;
        }
    }
    return out;
}

} // namespace memwalk
