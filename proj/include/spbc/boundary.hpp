#pragma once

#include <optional>
#include <utility>

#include "spbc/types.hpp"

namespace spbc {

// Rotation angle theta in (0, pi), carried exactly as (P/Q)*pi when the
// orbit is to be classified or periodically extended. A floating theta can
// only produce the quasi-periodic extension.
class RotationAngle {
  public:
    static RotationAngle rational(long p, long q);
    static RotationAngle real(double theta);

    bool is_rational() const { return rational_; }
    long p() const { return p_; }
    long q() const { return q_; }
    double value() const { return value_; }

  private:
    RotationAngle() = default;
    bool rational_ = false;
    long p_ = 0, q_ = 0;
    double value_ = 0.0;
};

// Six boundary parameters a, the piece duration T and the rotation angle.
struct BoundaryParams {
    Vector6 a = Vector6::Zero();
    double T = 1.0;
    RotationAngle theta = RotationAngle::real(1.0);
};

// R(theta) = [[cos, -sin], [sin, cos]]. Configurations act by RIGHT
// multiplication of row vectors: (x, y) R = (x cos + y sin, -x sin + y cos).
Mat2 rotation_matrix(double theta);

// Reflection about the y-axis, (x, y) -> (-x, y), applied row-wise.
Configuration reflect_y(const Configuration& q);

// Start template: isosceles triangle q1, q2, q3 with q4 in the symmetry
// axis; rows (a1,a2), (0,-a3), (-a1,a2), (0,-2a2+a3). Column sums vanish.
Configuration build_qstart(double a1, double a2, double a3);

// End template: trapezoid rows (-a5,a4), (a5,a4), (-a6,-a4), (a6,-a4),
// right-multiplied by R(theta).
Configuration build_qend(double a4, double a5, double a6, double theta);

struct CircularAction {
    double action = 0.0;
    Vector6 a_circ = Vector6::Zero();
    double radius = 0.0;
    double period = 0.0;    // full revolution period of the circular motion
    bool degenerate = false;  // alpha = 0: the benchmark collapses
};

// Action over [0, T] of the boundary-compatible piece of uniform circular
// motion of the four equal masses on a square. Throws DegenerateAngle at
// theta = pi/2 where the template switches; at theta = pi/4 and 3pi/4 the
// rotation alpha vanishes and the degenerate flag is set with action 0.
CircularAction circular_action(double theta, double T);

// Action of the straight constant-velocity path from Qstart(a) to
// Qend(a, theta). Pairwise potential integrals are evaluated in closed form
// with an adaptive-quadrature fallback for degenerate relative motion.
double test_path_action(const BoundaryParams& bp,
                        const MassSystem& ms = MassSystem::equal_unit());

// Kinetic part alone, sum_k m_k |Qend_k - Qstart_k|^2 / (2T).
double test_path_kinetic(const BoundaryParams& bp,
                         const MassSystem& ms = MassSystem::equal_unit());

struct ThetaBrackets {
    std::pair<double, double> theta0;  // crossing inside (pi/4, pi/2)
    std::pair<double, double> theta1;  // crossing inside (pi/2, 3pi/4)
};

// Locates the two sign changes of
//   g(theta) = circular_action(theta, T) - test_path_action(a_ref, theta, T)
// by bisection to bracket width 1e-6. Between the crossings the test path
// beats the circular benchmark, which is what makes the minimizing piece
// non-circular there.
ThetaBrackets theta_brackets(const Vector6& a_ref, double T);

}  // namespace spbc
