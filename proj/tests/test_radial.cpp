#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lelab/errors.hpp"
#include "lelab/radial.hpp"

using namespace lelab;

TEST_CASE("radial nodal branch at p=100 reproduces the published limits") {
    RadialSolution sol = solve_radial_nodal(100.0);
    CHECK(std::abs(sol.max_positive - 2.46) / 2.46 <= 0.05);
    CHECK(std::abs(sol.max_negative - 1.17) / 1.17 <= 0.05);
    CHECK(sol.residual_at_one <= 1e-10);
    CHECK(sol.node_radius > 0.0);
    CHECK(sol.node_radius < 1.0);
    CHECK(sol.alpha == sol.max_positive);
}

TEST_CASE("sup-norm gap grows linearly in p along the radial branch") {
    RadialSolution s50 = solve_radial_nodal(50.0);
    RadialSolution s100 = solve_radial_nodal(100.0);
    const double g50 = 50.0 * (s50.max_positive - s50.max_negative);
    const double g100 = 100.0 * (s100.max_positive - s100.max_negative);
    CHECK(g50 > 0.0);
    CHECK(g100 / g50 >= 1.8);
}

TEST_CASE("radial profile endpoints and sign structure") {
    RadialSolution sol = solve_radial_nodal(20.0);
    CHECK(sol.radii.front() == 0.0);
    CHECK(sol.radii.back() == 1.0);
    CHECK(std::abs(sol.values.back()) <= 1e-10);
    CHECK(sol.values.front() == doctest::Approx(sol.alpha).epsilon(1e-12));
    int changes = 0;
    double last = 0.0;
    for (double v : sol.values) {
        if (std::abs(v) < 1e-8) continue;  // boundary approach
        if (last != 0.0 && (v > 0) != (last > 0)) ++changes;
        last = v;
    }
    CHECK(changes == 1);
}

TEST_CASE("positive radial solution at p=5 matches an independent value") {
    // frozen from a high-order independent integration of the same ODE
    RadialSolution sol = solve_radial_positive(5.0);
    CHECK(sol.alpha == doctest::Approx(2.3297155590849954).epsilon(1e-7));
    CHECK(sol.max_negative <= 1e-12);
    CHECK(sol.residual_at_one <= 1e-10);
}

TEST_CASE("shooting rejects p <= 1") {
    CHECK_THROWS_AS(solve_radial_nodal(1.0), UsageError);
}
