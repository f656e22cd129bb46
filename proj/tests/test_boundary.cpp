#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spbc/boundary.hpp"
#include "spbc/dynamics.hpp"
#include "spbc/fixtures.hpp"
#include "test_helpers.hpp"

using namespace spbc;
namespace tst = spbc::testing;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("rotation matrix convention and group law") {
    CHECK((rotation_matrix(0.0) - Mat2::Identity()).norm() < 1e-15);

    Eigen::RowVector2d e(1.0, 0.0);
    const Eigen::RowVector2d r = e * rotation_matrix(kPi / 2.0);
    CHECK(r(0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r(1) == doctest::Approx(-1.0).epsilon(1e-15));

    auto gen = tst::rng(10);
    std::uniform_real_distribution<double> ang(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const double a = ang(gen), b = ang(gen);
        const Mat2 lhs = rotation_matrix(a) * rotation_matrix(b);
        CHECK((lhs - rotation_matrix(a + b)).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("reflection about the y-axis") {
    Configuration q;
    q << 3, 5, 1, -2, 0, 7, -4, -4;
    const Configuration r = reflect_y(q);
    CHECK(r(0, 0) == -3.0);
    CHECK(r(0, 1) == 5.0);
    CHECK((reflect_y(r) - q).cwiseAbs().maxCoeff() == 0.0);

    // Reflecting the start template swaps bodies 1 and 3.
    const Configuration qs = build_qstart(1.3, 0.7, 0.4);
    const Configuration qr = reflect_y(qs);
    CHECK((qr.row(0) - qs.row(2)).norm() < 1e-15);
    CHECK((qr.row(2) - qs.row(0)).norm() < 1e-15);
    CHECK((qr.row(1) - qs.row(1)).norm() < 1e-15);
    CHECK((qr.row(3) - qs.row(3)).norm() < 1e-15);
}

TEST_CASE("start template") {
    CHECK(build_qstart(0, 0, 0).cwiseAbs().maxCoeff() == 0.0);

    const Vector6 a0 = fixtures::star_pentagon().a0;
    const Configuration q = build_qstart(a0[0], a0[1], a0[2]);
    const PhaseState fx = fixtures::star_pentagon().state0;
    CHECK((q - fx.q).cwiseAbs().maxCoeff() < 1e-12);

    auto gen = tst::rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        const Configuration t = build_qstart(u(gen), u(gen), u(gen));
        CHECK(std::abs(t.col(0).sum()) < 1e-15);
        CHECK(std::abs(t.col(1).sum()) < 1e-15);
    }
}

TEST_CASE("end template") {
    const Configuration rect = build_qend(1, 1, 1, 0.0);
    Configuration expect;
    expect << -1, 1, 1, 1, -1, -1, 1, -1;
    CHECK((rect - expect).cwiseAbs().maxCoeff() < 1e-15);

    // The circular boundary vector reproduces a rotated square.
    const CircularAction ca = circular_action(2.0 * kPi / 5.0, 1.0);
    const Configuration qe =
        build_qend(ca.a_circ[3], ca.a_circ[4], ca.a_circ[5], 2.0 * kPi / 5.0);
    for (int i = 0; i < 4; ++i) {
        CHECK(qe.row(i).norm() == doctest::Approx(ca.radius).epsilon(1e-12));
    }
    // and the rotation undoes exactly
    const Configuration back = qe * rotation_matrix(-2.0 * kPi / 5.0);
    const Configuration tmpl =
        build_qend(ca.a_circ[3], ca.a_circ[4], ca.a_circ[5], 0.0);
    CHECK((back - tmpl).cwiseAbs().maxCoeff() < 1e-14);

    auto gen = tst::rng(12);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        const Configuration t = build_qend(u(gen), u(gen), u(gen), u(gen));
        CHECK(std::abs(t.col(0).sum()) < 1e-13);
        CHECK(std::abs(t.col(1).sum()) < 1e-13);
    }
}

TEST_CASE("circular action closed form") {
    const CircularAction ca = circular_action(2.0 * kPi / 5.0, 1.0);
    CHECK(std::abs(ca.action - 3.528734094) < 1e-6);
    CHECK(std::abs(ca.radius - 1.6272) < 5e-4);
    // r^3 omega^2 = U0 / 4 with omega = alpha / T
    const double alpha = 2.0 * kPi / 5.0 - kPi / 4.0;
    const double u0 = 2.0 * std::sqrt(2.0) + 1.0;
    CHECK(std::pow(ca.radius, 3) * alpha * alpha ==
          doctest::Approx(u0 / 4.0).epsilon(1e-12));
    CHECK(ca.period == doctest::Approx(2.0 * kPi / alpha).epsilon(1e-12));

    // alpha -> 0 kills the action.
    CHECK(circular_action(kPi / 4.0 + 1e-6, 1.0).action < 1e-3);
    CHECK(circular_action(kPi / 4.0, 1.0).degenerate);
    CHECK(circular_action(3.0 * kPi / 4.0, 1.0).degenerate);
    CHECK_THROWS_AS(circular_action(kPi / 2.0, 1.0), DegenerateAngle);

    // |theta - 3pi/4| symmetry.
    for (double d : {0.05, 0.12}) {
        CHECK(circular_action(3.0 * kPi / 4.0 - d, 1.0).action ==
              doctest::Approx(circular_action(3.0 * kPi / 4.0 + d, 1.0).action)
                  .epsilon(1e-13));
    }

    // T^(1/3) scaling at fixed theta.
    for (double th : {0.9, 1.3, 2.0}) {
        const double a1 = circular_action(th, 1.0).action;
        const double a8 = circular_action(th, 8.0).action;
        CHECK(a8 == doctest::Approx(2.0 * a1).epsilon(1e-12));
    }
}

TEST_CASE("test path action at the reference vector") {
    BoundaryParams bp;
    bp.a = fixtures::reference_boundary().a;
    bp.T = 1.0;
    bp.theta = RotationAngle::rational(2, 5);
    CHECK(std::abs(test_path_kinetic(bp) - 1.0633) < 1e-4);
    CHECK(std::abs(test_path_action(bp) -
                   fixtures::reference_boundary().test_path_action) < 5e-4);
    // strictly above the kinetic term
    CHECK(test_path_action(bp) > test_path_kinetic(bp));
}

TEST_CASE("coincident endpoints give T times the start potential") {
    // At theta = pi/4 the square boundary vector satisfies Qend = Qstart.
    const double a1 = 1.5, h = std::sqrt(2.0) / 2.0 * a1;
    BoundaryParams bp;
    bp.a << a1, 0.0, -a1, h, -h, h;
    bp.T = 1.0;
    bp.theta = RotationAngle::real(kPi / 4.0);
    const Configuration qs = build_qstart(bp.a[0], bp.a[1], bp.a[2]);
    const Configuration qe =
        build_qend(bp.a[3], bp.a[4], bp.a[5], bp.theta.value());
    REQUIRE((qe - qs).cwiseAbs().maxCoeff() < 1e-14);
    const MassSystem ms;
    CHECK(test_path_action(bp) ==
          doctest::Approx(bp.T * potential(qs, ms)).epsilon(1e-6));
}

TEST_CASE("closed form agrees with a Simpson oracle on random vectors") {
    const MassSystem ms;
    auto gen = tst::rng(13);
    std::uniform_real_distribution<double> u(0.4, 2.2);
    std::uniform_real_distribution<double> th(0.3, 2.6);
    for (int trial = 0; trial < 12; ++trial) {
        BoundaryParams bp;
        bp.a << u(gen), u(gen), u(gen), u(gen), u(gen), u(gen);
        bp.T = 1.0;
        bp.theta = RotationAngle::real(th(gen));
        const Configuration qs = build_qstart(bp.a[0], bp.a[1], bp.a[2]);
        const Configuration qe =
            build_qend(bp.a[3], bp.a[4], bp.a[5], bp.theta.value());
        double closed;
        try {
            closed = test_path_action(bp);
        } catch (const CollisionOnSegment&) {
            continue;
        }
        const auto straight = [&](double t) {
            const Configuration q = qs + (t / bp.T) * (qe - qs);
            return potential(q, ms);
        };
        const double oracle =
            test_path_kinetic(bp) + tst::simpson(straight, 0.0, bp.T, 10000);
        CHECK(std::abs(closed - oracle) / std::abs(oracle) < 1e-8);
    }
}

TEST_CASE("collision on the segment is refused") {
    BoundaryParams bp;
    // a4 = 0 with a5 = a6 puts bodies 2 and 4 at the same end point.
    bp.a << 1.0, 1.0, 0.5, 0.0, 1.2, 1.2;
    bp.T = 1.0;
    bp.theta = RotationAngle::real(1.1);
    CHECK_THROWS_AS(test_path_action(bp), CollisionOnSegment);
}

TEST_CASE("action-level brackets for theta0 and theta1") {
    const ThetaBrackets br =
        theta_brackets(fixtures::reference_boundary().a, 1.0);
    const auto& fx = fixtures::angle_brackets();
    CHECK(br.theta0.second - br.theta0.first <= 1e-6);
    CHECK(br.theta1.second - br.theta1.first <= 1e-6);
    CHECK(br.theta0.first > fx.theta0.first);
    CHECK(br.theta0.second < fx.theta0.second);
    CHECK(br.theta1.first > fx.theta1.first);
    CHECK(br.theta1.second < fx.theta1.second);

    // g(2pi/5) > 0: the straight path beats the circular benchmark there.
    BoundaryParams bp;
    bp.a = fixtures::reference_boundary().a;
    bp.T = 1.0;
    bp.theta = RotationAngle::rational(2, 5);
    CHECK(circular_action(bp.theta.value(), 1.0).action >
          test_path_action(bp));
}

TEST_CASE("start and end families intersect only at zero away from the "
          "degenerate angles") {
    const auto rank_of = [](double theta) {
        // Columns: d(Qstart - Qend)/da_i flattened to 8 rows per coordinate
        // pair. Trivial kernel means rank 6.
        Eigen::Matrix<double, 8, 6> M = Eigen::Matrix<double, 8, 6>::Zero();
        const auto put = [&](int col, const Configuration& c) {
            for (int i = 0; i < 4; ++i) {
                M(2 * i, col) = c(i, 0);
                M(2 * i + 1, col) = c(i, 1);
            }
        };
        put(0, build_qstart(1, 0, 0));
        put(1, build_qstart(0, 1, 0));
        put(2, build_qstart(0, 0, 1));
        Configuration e4 = -build_qend(1, 0, 0, theta);
        Configuration e5 = -build_qend(0, 1, 0, theta);
        Configuration e6 = -build_qend(0, 0, 1, theta);
        put(3, e4);
        put(4, e5);
        put(5, e6);
        return Eigen::FullPivLU<Eigen::MatrixXd>(M).rank();
    };
    for (double th : {0.4, 1.0, 1.3, 2.0, 2.5}) {
        CHECK(rank_of(th) == 6);
    }
    for (double th : {kPi / 4.0, kPi / 2.0, 3.0 * kPi / 4.0}) {
        CHECK(rank_of(th) < 6);
    }
}

TEST_CASE("rational angles reduce and validate") {
    const RotationAngle r = RotationAngle::rational(4, 10);
    CHECK(r.p() == 2);
    CHECK(r.q() == 5);
    CHECK_THROWS_AS(RotationAngle::rational(5, 5), OutOfDomain);
    CHECK_THROWS_AS(RotationAngle::rational(-1, 3), OutOfDomain);
    CHECK_THROWS_AS(RotationAngle::real(0.0), OutOfDomain);
    CHECK_THROWS_AS(RotationAngle::real(3.15), OutOfDomain);
}
