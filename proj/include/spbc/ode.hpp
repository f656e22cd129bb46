#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

#include "spbc/errors.hpp"

namespace spbc {

// Right-hand side of an autonomous-or-not first-order system y' = f(t, y).
using OdeRhs = std::function<void(double t, const Eigen::VectorXd& y,
                                  Eigen::VectorXd& dydt)>;

struct OdeOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    double initial_step = 0.0;  // 0 selects automatically
    double max_step = 0.0;      // 0 means |t1 - t0|
    long max_steps = 50'000'000;
};

// One accepted step with the interpolation coefficients of the embedded
// pair's quartic interpolant.
struct OdeStep {
    double t0 = 0.0;
    double h = 0.0;
    std::array<Eigen::VectorXd, 5> rcont;
};

// Dense solution of an initial value problem. Steps are stored in
// integration order; `eval` accepts any time inside the span.
class OdeSolution {
  public:
    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }
    std::size_t step_count() const { return steps_.size(); }

    Eigen::VectorXd eval(double t) const;
    const Eigen::VectorXd& final_state() const { return y_end_; }

  private:
    friend OdeSolution integrate_ode(const OdeRhs&, double, double,
                                     const Eigen::VectorXd&, const OdeOptions&);
    std::vector<OdeStep> steps_;
    double t_begin_ = 0.0, t_end_ = 0.0;
    Eigen::VectorXd y_end_;
};

// Dormand-Prince 5(4) with PI step-size control and dense output.
// Integrates from t0 to t1; t1 < t0 integrates backward.
OdeSolution integrate_ode(const OdeRhs& rhs, double t0, double t1,
                          const Eigen::VectorXd& y0,
                          const OdeOptions& opts = {});

}  // namespace spbc
