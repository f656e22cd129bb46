#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spbc/fixtures.hpp"
#include "spbc/outersolve.hpp"
#include "test_helpers.hpp"

using namespace spbc;

TEST_CASE("outer objective benchmarks on the reference fiber") {
    const MassSystem ms;
    const RotationAngle theta = RotationAngle::rational(2, 5);
    OuterObjective obj(theta, 1.0, ms);
    CHECK(obj(fixtures::reference_boundary().a) <= 3.2484);

    const CircularAction ca = circular_action(theta.value(), 1.0);
    CHECK(std::abs(obj(ca.a_circ) - 3.528734094) < 1e-3);
}

TEST_CASE("outer minimization recovers the reference minimizer") {
    const MassSystem ms;
    const RotationAngle theta = RotationAngle::rational(2, 5);
    const OuterResult res =
        outer_minimize(fixtures::reference_boundary().a, theta, 1.0, ms);
    CHECK(res.converged);
    CHECK(res.polish_grad_norm < 1e-7);

    const Vector6 a0 = fixtures::star_pentagon().a0;
    CHECK((res.a_star - a0).cwiseAbs().maxCoeff() < 1e-3);
    CHECK(res.value < 3.2484);
    CHECK(res.value <
          fixtures::reference_boundary().circular_action - 0.2);

    // Re-solve consistency: a cold inner solve reproduces the value.
    OuterObjective obj(theta, 1.0, ms);
    const InnerResult cold = obj.solve(res.a_star, /*cold=*/true);
    CHECK(std::abs(cold.value - res.value) < 1e-6);
    CHECK(std::abs(cold.value - res.value) < 1e-10);

    // Descent relative to the seed.
    CHECK(res.value <= obj(fixtures::reference_boundary().a) + 1e-12);
}

TEST_CASE("seeding at the circular critical point never increases") {
    const MassSystem ms;
    const RotationAngle theta = RotationAngle::rational(2, 5);
    const CircularAction ca = circular_action(theta.value(), 1.0);
    OuterObjective probe(theta, 1.0, ms);
    const double at_seed = probe(ca.a_circ);
    const OuterResult res = outer_minimize(ca.a_circ, theta, 1.0, ms);
    CHECK(res.value <= at_seed + 1e-9);
}

TEST_CASE("coercivity probe grows along rays") {
    const MassSystem ms;
    const RotationAngle theta = RotationAngle::rational(2, 5);
    const auto rows = coercivity_probe(fixtures::reference_boundary().a,
                                       {1.0, 4.0, 16.0}, theta, 1.0, ms);
    REQUIRE(rows.size() == 3);
    CHECK(rows[2].second > rows[0].second);

    OuterObjective obj(theta, 1.0, ms);
    CHECK(rows[0].second ==
          doctest::Approx(obj(fixtures::reference_boundary().a)).epsilon(1e-9));

    CHECK_THROWS_AS(
        coercivity_probe(fixtures::reference_boundary().a, {1.0},
                         RotationAngle::real(std::numbers::pi / 2.0 - 1e-12),
                         1.0, ms),
        DegenerateAngle);
}
