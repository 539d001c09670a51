// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "memwalk/quadrature.hpp"

using memwalk::quad::integrate;
using memwalk::quad::integrate_with_breakpoints;

TEST_CASE("polynomials and smooth integrands") {
    REQUIRE(integrate([](double x) { return x * x; }, 0.0, 1.0).value ==
            Catch::Approx(1.0 / 3.0).epsilon(1e-14));
    REQUIRE(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value ==
            Catch::Approx(2.0).epsilon(1e-13));
    REQUIRE(integrate([](double x) { return std::exp(-x); }, 0.0, 50.0).value ==
            Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("error estimate bounds the true error") {
    const auto r = integrate([](double x) { return std::exp(-x * x); }, 0.0, 10.0);
    const double exact = 0.5 * std::sqrt(std::numbers::pi);
    REQUIRE(std::abs(r.value - exact) <= std::max(r.error_estimate, 1e-13));
}

TEST_CASE("breakpoint at a kink keeps full accuracy") {
    auto kinked = [](double x) { return x < 1.0 ? 1.0 - x : 0.0; };
    const auto r = integrate_with_breakpoints(kinked, 0.0, 3.0, {1.0});
    REQUIRE(r.value == Catch::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("non-convergence reports the achieved error") {
    auto nasty = [](double x) { return std::cos(1.0 / (x + 1e-14)) / std::sqrt(x + 1e-14); };
    try {
        integrate(nasty, 0.0, 1.0, 1e-300, 1e-300, 8);
        FAIL("expected QuadratureError");
    } catch (const memwalk::quad::QuadratureError& e) {
        REQUIRE(e.achieved_error() > 0.0);
    }
}

TEST_CASE("empty interval integrates to zero") {
    REQUIRE(integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}
