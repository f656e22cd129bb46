#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spbc/dynamics.hpp"
#include "spbc/pathopt.hpp"

namespace spbc {

enum class OrbitKind {
    QuasiPeriodic,
    NonChoreographic,
    ChoreographicForward,   // bodies chase in the order q1 q2 q3 q4
    DoubleChoreographic,    // (q1, q3) share a curve, (q2, q4) another
    ChoreographicReverse,   // bodies chase in the order q1 q4 q3 q2
};

std::string to_string(OrbitKind kind);

struct Classification {
    OrbitKind kind = OrbitKind::QuasiPeriodic;
    int curves = 0;            // distinct closed curves (0 when quasi-periodic)
    int sides_per_curve = 0;   // 0 when not periodic
    long period_multiple = 0;  // minimal period / T; 0 when not periodic
    std::string chase_order;   // empty when there is no chase relation
};

// Classifies the extension of a piece by the rotation angle alone. Rational
// theta = (P/Q) pi gives, by Q mod 4: non-choreographic (2QT), forward
// choreographic (8QT), double choreographic (4QT), reverse choreographic
// (8QT). Irrational theta never closes.
Classification classify_angle(const RotationAngle& theta);

// A solved piece on [0, T] with positions and velocities, the unit the
// extension is assembled from.
class OrbitPiece {
  public:
    OrbitPiece() = default;
    static OrbitPiece from_path(const DiscretePath& path);
    static OrbitPiece from_trajectory(const Trajectory& traj);

    double T() const { return T_; }
    void eval(double s, Configuration& q, Configuration& v) const;

  private:
    double T_ = 0.0;
    std::function<void(double, Configuration&, Configuration&)> eval_;
};

struct JunctionReport {
    double pos_res = 0.0;  // sup position mismatch at the t = T, 2T junctions
    double vel_res = 0.0;  // sup velocity mismatch there
    Eigen::Matrix<double, 8, 1> transversality =
        Eigen::Matrix<double, 8, 1>::Zero();  // A_11,A_12,...,A_42 at t = T
};

// The assembled solution: the piece plus its reflection-permutation-rotation
// extension over [0, 2 cycles T].
struct Orbit {
    RotationAngle theta = RotationAngle::real(1.0);
    double T = 1.0;
    Classification classification;
    OrbitPiece piece;
    int cycles = 0;       // number of 2T blocks; 0 keeps just the piece
    double t_total = 0.0;
    std::vector<std::pair<double, PhaseState>> samples;
    JunctionReport junctions;
    double closure = 0.0;  // sup |state(t_total) - state(0)| when periodic

    // Extension formula at any time; negative times wrap by the minimal
    // period for periodic kinds and are rejected otherwise.
    void state_at(double t, Configuration& q, Configuration& v) const;
    PhaseState state_at(double t) const;
};

// Builds the orbit from a piece. cycles < 0 selects the minimal-period
// multiple for rational theta (and 20 blocks for irrational theta).
Orbit extend_orbit(const OrbitPiece& piece, const RotationAngle& theta,
                   int cycles = -1, int samples_per_T = 64);

JunctionReport junction_residuals(const Orbit& orbit);

struct CheckReport {
    bool pass = false;
    double max_error = 0.0;
    std::string detail;
};

// Kind-specific chase identities, checked at sample times across the period.
CheckReport verify_choreography(const Orbit& orbit, double tol);

// Time-reflection symmetry q1(-t) = q3(t) B, q2(-t) = q2(t) B,
// q4(-t) = q4(t) B, plus the junction shapes: isosceles triangle with an
// interior axis point at even multiples of T, trapezoid at odd multiples.
// Quasi-periodic orbits realize negative times by backward integration.
CheckReport verify_symmetry(const Orbit& orbit, double tol,
                            const MassSystem& ms = MassSystem::equal_unit());

struct ShootingResult {
    PhaseState state;      // refined initial state, centered
    Vector6 a = Vector6::Zero();
    double residual = 0.0;
    int iterations = 0;
};

// Newton polish of the boundary-value solution as a 6-unknown least-squares
// shooting problem: unknowns (a1, a2, a3, v1x, v1y, v2x) with the symmetric
// start velocities built in; residuals are the five end-template shape
// conditions of q(T) R(-theta) and the eight junction velocity conditions.
ShootingResult shooting_refine(const Vector6& a_seed,
                               const RotationAngle& theta, double T,
                               const MassSystem& ms, double tol = 1e-10,
                               const DiscretePath* path_hint = nullptr);

// The eight junction velocity residuals A_kj of the piece at t = T.
Eigen::Matrix<double, 8, 1> transversality_residuals(const Configuration& vT,
                                                     double theta);

}  // namespace spbc
