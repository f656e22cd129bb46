#pragma once

#include <utility>
#include <vector>

#include "spbc/ode.hpp"
#include "spbc/types.hpp"

namespace spbc {

// Newtonian potential U = sum_{i<j} m_i m_j / |q_i - q_j| (G = 1).
// Throws CollisionError on a zero pairwise separation.
double potential(const Configuration& q, const MassSystem& ms);

// Accelerations qdd_i = sum_{j != i} m_j (q_j - q_i) / |q_j - q_i|^3.
Configuration accelerations(const Configuration& q, const MassSystem& ms);

// H = sum |p_i|^2 / (2 m_i) - U with p_i = m_i v_i.
double total_energy(const PhaseState& s, const MassSystem& ms);

// Total angular momentum sum m_i (x_i vy_i - y_i vx_i).
double angular_momentum(const PhaseState& s, const MassSystem& ms);

// Flow trajectory with the integrator's dense output.
class Trajectory {
  public:
    Trajectory(OdeSolution sol) : sol_(std::move(sol)) {}

    double t_begin() const { return sol_.t_begin(); }
    double t_end() const { return sol_.t_end(); }

    PhaseState at(double t) const;

    // n+1 equispaced samples across the span.
    std::vector<std::pair<double, PhaseState>> samples(int n) const;

    const OdeSolution& solution() const { return sol_; }

  private:
    OdeSolution sol_;
};

struct FlowOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    // Below this pairwise separation the flow is aborted with CollisionError.
    double collision_radius = 1e-9;
};

// Adaptive 5(4) integration of the 4-body equations of motion from t0 to t1
// (backward if t1 < t0). State vector layout: 8 positions then 8 velocities.
Trajectory integrate_flow(const PhaseState& s0, const MassSystem& ms,
                          double t0, double t1, const FlowOptions& opts = {});

// Packing helpers shared with the shooting and reduction code.
Eigen::VectorXd pack_state(const PhaseState& s);
PhaseState unpack_state(const Eigen::VectorXd& y);

}  // namespace spbc
