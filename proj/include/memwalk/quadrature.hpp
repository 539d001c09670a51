// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace memwalk::quad {

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved_error)
        : std::runtime_error(what), achieved_error_(achieved_error) {}
    double achieved_error() const { return achieved_error_; }

private:
    double achieved_error_;
};

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions = 0;
};

namespace detail {

// Gauss-Kronrod 15(7) abscissae/weights on [-1,1] (positive half).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
inline void gk15(F&& f, double a, double b, double& kronrod, double& err) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double fc = f(mid);
    double gauss = fc * kGaussWeights[3];
    kronrod = fc * kKronrodWeights[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kGK15Nodes[j];
        const double fsum = f(mid - dx) + f(mid + dx);
        kronrod += fsum * kKronrodWeights[j];
        if (j % 2 == 1) gauss += fsum * kGaussWeights[j / 2];
    }
    kronrod *= half;
    gauss *= half;
    err = std::abs(kronrod - gauss);
}

struct Segment {
    double a, b, value, err;
};

} // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a,b].
/// Splits the segment with the largest error estimate until
/// sum(err) <= max(abs_tol, rel_tol*|integral|) or the subdivision cap is hit.
template <class F>
inline Result integrate(F&& f, double a, double b, double abs_tol = 1e-11,
                        double rel_tol = 1e-13, int max_subdivisions = 4000) {
    Result res;
    if (a == b) return res;

    std::vector<detail::Segment> segs;
    segs.reserve(64);
    double v, e;
    detail::gk15(f, a, b, v, e);
    segs.push_back({a, b, v, e});

    auto totals = [&segs]() {
        // Kahan-compensated accumulation over segments.
        double sum = 0.0, comp = 0.0, err = 0.0;
        for (const auto& s : segs) {
            const double y = s.value - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            err += s.err;
        }
        return std::pair<double, double>(sum, err);
    };

    int splits = 0;
    while (true) {
        auto [sum, err] = totals();
        if (err <= std::max(abs_tol, rel_tol * std::abs(sum))) {
            res.value = sum;
            res.error_estimate = err;
            res.subdivisions = splits;
            return res;
        }
        if (splits >= max_subdivisions) {
            throw QuadratureError(
                "adaptive quadrature did not converge: achieved error " +
                    std::to_string(err) + " over [" + std::to_string(a) + ", " +
                    std::to_string(b) + "]",
                err);
        }
        auto worst = std::max_element(
            segs.begin(), segs.end(),
            [](const detail::Segment& x, const detail::Segment& y) { return x.err < y.err; });
        const detail::Segment s = *worst;
        const double m = 0.5 * (s.a + s.b);
        if (m <= s.a || m >= s.b) {
            // interval at floating-point resolution; accept as is
            worst->err = 0.0;
            continue;
        }
        detail::Segment left{s.a, m, 0.0, 0.0}, right{m, s.b, 0.0, 0.0};
        detail::gk15(f, left.a, left.b, left.value, left.err);
        detail::gk15(f, right.a, right.b, right.value, right.err);
        *worst = left;
        segs.push_back(right);
        ++splits;
    }
}

/// Integration with interior breakpoints (e.g. kernel support edges).
template <class F>
inline Result integrate_with_breakpoints(F&& f, double a, double b,
                                         const std::vector<double>& breakpoints,
                                         double abs_tol = 1e-11, double rel_tol = 1e-13,
                                         int max_subdivisions = 4000) {
    std::vector<double> pts;
    pts.push_back(a);
    for (double p : breakpoints) {
        if (p > a && p < b) pts.push_back(p);
    }
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());

    Result total;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Result r = integrate(f, pts[i], pts[i + 1], abs_tol, rel_tol, max_subdivisions);
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.subdivisions += r.subdivisions;
    }
    return total;
}

} // namespace memwalk::quad
