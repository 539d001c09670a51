// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "memwalk/theory.hpp"
#include "support/test_oracles.hpp"

using namespace memwalk;

TEST_CASE("primitive integrals of the uniform kernel") {
    const auto p = primitive_integrals(Kernel::uniform(1.0), 2.0);
    REQUIRE(p.i1 == Catch::Approx(0.5).epsilon(1e-14));
    REQUIRE(p.i2 == Catch::Approx(1.5).epsilon(1e-14));
    REQUIRE(p.i3 == Catch::Approx(11.0 / 6.0).epsilon(1e-14));
    REQUIRE(p.i4 == Catch::Approx(7.0 / 4.0).epsilon(1e-14));
    REQUIRE(p.m_tau == 1.0);
}

TEST_CASE("primitive integrals approach their limits") {
    const auto p = primitive_integrals(Kernel::exponential(1.0), 50.0);
    REQUIRE(p.i1 == Catch::Approx(1.0).epsilon(1e-9));
    REQUIRE(p.m_tau == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("stretched primitive i1 equals the incomplete-gamma closed form") {
    // int_0^9 s mu(s) ds = gamma(4, 3) for a = 1/2; frozen value 2.1166086673066125
    const auto p = primitive_integrals(Kernel::stretched(0.5), 9.0);
    REQUIRE(p.i1 == Catch::Approx(2.1166086673066125).epsilon(1e-10));
    const Kernel k = Kernel::stretched(0.5);
    const double by_quadrature =
        oracle::integrate([&k](double s) { return s * k.density(s); }, 0.0, 9.0, 1e-13);
    REQUIRE(p.i1 == Catch::Approx(by_quadrature).epsilon(1e-10));
}

TEST_CASE("primitive integrals are monotone in tau and satisfy the bounds") {
    for (const Kernel& k : {Kernel::stretched(0.5), Kernel::half_normal(), Kernel::lomax(1.5)}) {
        double prev_i1 = 0.0, prev_i2 = 0.0, prev_i3 = 0.0, prev_i4 = 0.0;
        for (double tau : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
            const auto p = primitive_integrals(k, tau);
            REQUIRE(p.i1 >= prev_i1);
            REQUIRE(p.i2 >= prev_i2);
            REQUIRE(p.i3 >= prev_i3);
            REQUIRE(p.i4 >= prev_i4);
            REQUIRE(p.i4 <= p.i3 * (1.0 + 1e-12));
            REQUIRE(p.i3 <= tau * tau / 2.0);
            REQUIRE(p.i1 <= k.first_moment() * (1.0 + 1e-12));
            prev_i1 = p.i1;
            prev_i2 = p.i2;
            prev_i3 = p.i3;
            prev_i4 = p.i4;
        }
    }
}

TEST_CASE("uniform alpha and beta are exact beyond the support") {
    for (double r : {1.0, 2.5}) {
        const Kernel k = Kernel::uniform(r);
        for (double tau : {r * 1.5, r * 4.0, r * 100.0}) {
            REQUIRE(alpha(k, tau) == Catch::Approx(r * r / 12.0).epsilon(1e-12));
            REQUIRE(beta(k, tau) == Catch::Approx(5.0 * r * r / 3.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("exponential alpha and beta match the closed-form transients") {
    const Kernel k = Kernel::exponential(1.0);
    // frozen from alpha(t) = e^{-2t}(-5 + e^{2t} - 4e^t(t-1) - 2t)/2 and
    // beta(t) = e^{-2t}(18 + 6e^{2t} + 20t + 8t^2 - 8e^t(3+t))
    REQUIRE(alpha(k, 1.0) == Catch::Approx(0.026326508671855542).epsilon(1e-12));
    REQUIRE(beta(k, 1.0) == Catch::Approx(0.4532809113980294).epsilon(1e-12));
    REQUIRE(alpha(k, 5.0) == Catch::Approx(0.4457559245340977).epsilon(1e-12));
    REQUIRE(beta(k, 5.0) == Catch::Approx(5.583208569723001).epsilon(1e-12));
    REQUIRE(alpha(k, 50.0) == Catch::Approx(0.5).margin(1e-9));
    REQUIRE(beta(k, 50.0) == Catch::Approx(6.0).margin(1e-8));
}

TEST_CASE("stretched a=1/2 alpha and beta reach 21 and 204") {
    const Kernel k = Kernel::stretched(0.5);
    REQUIRE(alpha(k, 2000.0) == Catch::Approx(21.0).epsilon(1e-6));
    REQUIRE(beta(k, 2000.0) == Catch::Approx(204.0).epsilon(1e-6));
}

TEST_CASE("a2_limit reproduces the closed-form table") {
    const struct {
        Kernel kernel;
        double exact;
    } rows[] = {
        {Kernel::uniform(1.0), 0.8},
        {Kernel::half_normal(), 2.0 - 4.0 / std::numbers::pi},
        {Kernel::exponential(1.0), 2.0 / 3.0},
        {Kernel::stretched(0.5), 10.0 / 17.0},
        {Kernel::stretched(0.25), 594.0 / 1193.0},
        {Kernel::lomax(1.5), 0.4},
        {Kernel::lomax(1.25), 2.0 / 7.0},
        {Kernel::lomax(1.05), 2.0 / 23.0},
    };
    for (const auto& row : rows) {
        const TheoryResult r = a2_limit(row.kernel);
        REQUIRE(std::abs(r.a2 - row.exact) <= 1e-6);
        REQUIRE(r.a2 == Catch::Approx(1.0 - 4.0 * r.alpha_limit / r.beta_limit).margin(1e-12));
        REQUIRE(r.beta_limit > 0.0);
        REQUIRE(r.alpha_limit >= 0.0);
        REQUIRE(r.beta_limit >= 4.0 * r.alpha_limit);
    }
}

TEST_CASE("a2_limit is scale invariant") {
    const double ref = a2_limit(Kernel::exponential(1.0)).a2;
    for (double lam : {0.5, 2.0}) {
        REQUIRE(a2_limit(Kernel::exponential(lam)).a2 == Catch::Approx(ref).margin(1e-8));
    }
    const double lref = a2_limit(Kernel::lomax(1.5, 1.0)).a2;
    for (double scale : {0.5, 2.0, 7.0}) {
        REQUIRE(a2_limit(Kernel::lomax(1.5, scale)).a2 == Catch::Approx(lref).margin(1e-8));
    }
}

TEST_CASE("a2_limit validates rel_tol") {
    REQUIRE_THROWS_AS(a2_limit(Kernel::exponential(1.0), 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(a2_limit(Kernel::exponential(1.0), 1e-2), std::invalid_argument);
}

TEST_CASE("lomax asphericity increases with the shape parameter") {
    double prev = -1.0;
    for (double a = 1.05; a <= 3.0; a += 0.13) {
        const double v = a2_limit(Kernel::lomax(a)).a2;
        REQUIRE(v > prev);
        REQUIRE(v == Catch::Approx(2.0 * (a - 1.0) / (3.0 * a - 2.0)).margin(1e-9));
        prev = v;
    }
}

TEST_CASE("closed_form_a2 coverage") {
    REQUIRE(closed_form_a2(Kernel::lomax(1.25)).value() == Catch::Approx(2.0 / 7.0));
    REQUIRE(closed_form_a2(Kernel::lomax(1.0 + 1e-9)).value() ==
            Catch::Approx(0.0).margin(1e-8));
    REQUIRE_FALSE(closed_form_a2(Kernel::stretched(0.3)).has_value());
    REQUIRE(closed_form_a2(Kernel::stretched(0.5)).value() == Catch::Approx(10.0 / 17.0));
    REQUIRE(closed_form_a2(Kernel::uniform(3.0)).value() == 0.8);
    REQUIRE(closed_form_a2(Kernel::half_normal()).value() ==
            Catch::Approx(2.0 - 4.0 / std::numbers::pi));
}

TEST_CASE("a2 stays in [0,1] along the ladder") {
    for (const Kernel& k :
         {Kernel::stretched(0.5), Kernel::stretched(0.25), Kernel::half_normal()}) {
        const double f = k.first_moment();
        for (double tau = 8.0 * f; tau <= 8.0 * f * 64.0; tau *= 2.0) {
            const double a = alpha(k, tau);
            const double b = beta(k, tau);
            const double val = 1.0 - 4.0 * a / b;
            REQUIRE(val >= -1e-9);
            REQUIRE(val <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("tensor moment oracle for the exponential kernel at tau=5") {
    const Kernel k = Kernel::exponential(1.0);
    REQUIRE(tensor_moment_oracle(k, 5.0, TensorMoment::e_t11) ==
            Catch::Approx(0.9595723180054873).epsilon(1e-13)); // 1 - 6 e^{-5}
    // frozen assemblies of the exact first/second moment formulas
    REQUIRE(tensor_moment_oracle(k, 5.0, TensorMoment::e_t11_sq) ==
            Catch::Approx(1.8708252513790764).epsilon(1e-12));
    REQUIRE(tensor_moment_oracle(k, 5.0, TensorMoment::e_t12_sq) ==
            Catch::Approx(0.4750231089483262).epsilon(1e-12));
}

TEST_CASE("second moments dominate squared first moments") {
    for (const Kernel& k : {Kernel::exponential(1.0), Kernel::stretched(0.5),
                            Kernel::lomax(1.5), Kernel::half_normal()}) {
        for (double tau : {0.5, 2.0, 10.0, 40.0}) {
            const double m1 = tensor_moment_oracle(k, tau, TensorMoment::e_t11);
            const double m2 = tensor_moment_oracle(k, tau, TensorMoment::e_t11_sq);
            REQUIRE(m2 >= m1 * m1 * (1.0 - 1e-12));
            REQUIRE(tensor_moment_oracle(k, tau, TensorMoment::e_t12_sq) >= -1e-12);
        }
    }
}

TEST_CASE("alpha and beta agree with their moment decompositions") {
    // alpha = E[T11 T22] - E[T12^2] = i1^2 - E[T12^2]; beta = 2 E[T11^2] + 2 i1^2
    for (const Kernel& k : {Kernel::exponential(0.7), Kernel::stretched(0.5),
                            Kernel::lomax(2.2), Kernel::uniform(1.0)}) {
        for (double tau : {1.0, 3.0, 9.0}) {
            const auto p = primitive_integrals(k, tau);
            const double t12sq = tensor_moment_oracle(k, tau, TensorMoment::e_t12_sq);
            const double t11sq = tensor_moment_oracle(k, tau, TensorMoment::e_t11_sq);
            REQUIRE(alpha(k, tau) ==
                    Catch::Approx(p.i1 * p.i1 - t12sq).epsilon(1e-11).margin(1e-13));
            REQUIRE(beta(k, tau) ==
                    Catch::Approx(2.0 * t11sq + 2.0 * p.i1 * p.i1).epsilon(1e-11));
        }
    }
}
