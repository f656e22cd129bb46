#pragma once

#include <vector>

#include "spbc/pathopt.hpp"

namespace spbc {

struct OuterOptions {
    InnerOptions inner;
    long max_evals = 20000;
    double simplex_tol = 1e-6;   // target simplex diameter
    double polish_gtol = 1e-7;   // sup-norm of the finite-difference gradient
    int polish_max_iters = 120;
    double init_spread = 0.05;   // initial simplex spread per coordinate
};

struct OuterResult {
    Vector6 a_star = Vector6::Zero();
    double value = 0.0;           // cold re-solve at a_star
    DiscretePath inner_path;
    long evaluations = 0;
    int simplex_iterations = 0;
    int polish_iterations = 0;
    double simplex_diameter = 0.0;
    double polish_grad_norm = 0.0;
    bool converged = false;
};

// The outer objective A~(a): inner-minimal action over the fiber of a.
// Keeps a bounded cache of converged coefficients and warm-starts each solve
// from the nearest cached fiber. Collision-bound fibers evaluate to +inf.
class OuterObjective {
  public:
    OuterObjective(RotationAngle theta, double T, const MassSystem& ms,
                   const InnerOptions& inner = {});

    double operator()(const Vector6& a);
    InnerResult solve(const Vector6& a, bool cold = false);

    long evaluations() const { return evaluations_; }
    const RotationAngle& theta() const { return theta_; }
    double T() const { return T_; }

  private:
    RotationAngle theta_;
    double T_;
    MassSystem ms_;
    InnerOptions inner_;
    long evaluations_ = 0;
    std::vector<std::pair<Vector6, Eigen::MatrixXd>> cache_;
};

// Minimizes A~ over R^6: derivative-free simplex descent to the target
// diameter, then a quasi-Newton polish on central finite differences with
// step 1e-6 (1 + |a_i|). Throws Stalled when neither phase reaches its goal
// within the evaluation budget.
OuterResult outer_minimize(const Vector6& seed, RotationAngle theta, double T,
                           const MassSystem& ms, const OuterOptions& opts = {});

// A~(s a) for each scale s; a divergence sanity probe. Refused at the
// degenerate angles where the start and end families intersect.
std::vector<std::pair<double, double>> coercivity_probe(
    const Vector6& a, const std::vector<double>& scales, RotationAngle theta,
    double T, const MassSystem& ms = MassSystem::equal_unit(),
    const InnerOptions& inner = {});

}  // namespace spbc
