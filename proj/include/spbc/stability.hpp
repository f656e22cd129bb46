#pragma once

#include <array>
#include <complex>
#include <string>

#include "spbc/dynamics.hpp"
#include "spbc/ode.hpp"
#include "spbc/types.hpp"

namespace spbc {

// Jacobi coordinates: center of mass and total momentum (g, G) plus the
// relative vectors u_i with conjugate momenta v_i, i = 2, 3, 4.
struct JacobiState {
    Vec2 g = Vec2::Zero();
    Vec2 G = Vec2::Zero();
    // u[0] = u2, u[1] = u3, u[2] = u4
    std::array<Vec2, 3> u{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    std::array<Vec2, 3> v{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
};

JacobiState to_jacobi(const PhaseState& s, const MassSystem& ms);
PhaseState from_jacobi(const JacobiState& js, const MassSystem& ms);

// Reduced phase point z = (r2, r3, r4, x3, x4, R2, R3, R4, X3, X4) with the
// total angular momentum c; x2 is the ignorable absolute angle kept as gauge
// metadata so the reduction can be undone.
struct ReducedState {
    Vector10 z = Vector10::Zero();
    double c = 0.0;
    double x2 = 0.0;
};

// Composition Jacobi -> symplectic polar -> difference angles. Requires a
// centered state; throws PolarSingularity when a Jacobi vector vanishes.
ReducedState to_reduced(const PhaseState& s, const MassSystem& ms);
PhaseState from_reduced(const ReducedState& rs, const MassSystem& ms);

// Reduced Hamiltonian
//   H4 = (R2^2 r2^2 + (c - X3)^2) / (2 M2 r2^2)
//      + (R3^2 r3^2 + (X3 - X4)^2) / (2 M3 r3^2)
//      + (R4^2 r4^2 + X4^2) / (2 M4 r4^2) - U4,
// with U4 evaluated by rebuilding the relative geometry in the theta2 = 0
// gauge (U is rotation invariant, so the gauge is irrelevant).
double h4_value(const Vector10& z, double c, const MassSystem& ms);

// Analytic gradient: closed-form kinetic part plus the chain rule through
// the geometry reconstruction for U4.
Vector10 h4_gradient(const Vector10& z, double c, const MassSystem& ms);

// Central finite differences of h4_gradient, step 1e-6 (1 + |z_i|).
Matrix10 h4_hessian(const Vector10& z, double c, const MassSystem& ms);

// Dense solution of the reduced flow zdot = J grad H4.
class ReducedTrajectory {
  public:
    ReducedTrajectory(OdeSolution sol, double c) : sol_(std::move(sol)), c_(c) {}
    Vector10 at(double t) const { return sol_.eval(t); }
    double t_end() const { return sol_.t_end(); }
    double c() const { return c_; }

  private:
    OdeSolution sol_;
    double c_;
};

ReducedTrajectory integrate_reduced(const ReducedState& z0, const MassSystem& ms,
                                    double t0, double t1, double abs_tol = 1e-12,
                                    double rel_tol = 1e-12);

enum class Verdict { LinearlyStable, SpectrallyStable, Unstable, Indeterminate };

std::string to_string(Verdict v);

struct MonodromyReport {
    Matrix10 X = Matrix10::Identity();
    double symplectic_residual = 0.0;  // |X^T J X - J|_inf
    Vector10 zdot0 = Vector10::Zero();  // orbit tangent at t = 0
    double closure = 0.0;               // reduced-orbit closure over the period

    // Filled by stability_verdict:
    std::array<std::complex<double>, 10> W_eigenvalues{};
    std::array<int, 2> trivial_indices{-1, -1};
    std::array<double, 4> nontrivial_pairs{};  // sorted pair values
    double pairing_gap = 0.0;  // worst within-pair eigenvalue spread
    Verdict verdict = Verdict::Indeterminate;
};

// Integrates the reduced orbit together with the 10x10 variational system
// over one period and returns the fundamental matrix X(period). The orbit
// must close to 1e-6 in the reduced variables (angles modulo 2 pi), else
// NotPeriodic is thrown. The finite-difference Hessian is validated against
// second differences of h4_value at the initial point.
MonodromyReport monodromy_matrix(const ReducedState& z0, const MassSystem& ms,
                                 double period, double abs_tol = 1e-12,
                                 double rel_tol = 1e-12);

// Eigenvalue analysis of W = (X + X^-1)/2: designates the two trivial unit
// multipliers (closest to +1, disambiguated by eigenvector projection onto
// span{zdot0, J zdot0} when the tangent is supplied), then classifies the
// remaining eight pair values. Requires symplectic residual below 1e-4.
MonodromyReport stability_verdict(const MonodromyReport& partial,
                                  double tol = 1e-3);
MonodromyReport stability_verdict(const Matrix10& X, double tol = 1e-3);

}  // namespace spbc
