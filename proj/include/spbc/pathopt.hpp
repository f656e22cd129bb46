#pragma once

#include <utility>

#include "spbc/boundary.hpp"
#include "spbc/quadrature.hpp"
#include "spbc/types.hpp"

namespace spbc {

// Path on [0, T] with pinned SPBC endpoints,
//   q_i(t) = Qstart_i + (t/T)(Qend_i - Qstart_i)
//            + sum_{k=1..K} c_{i,k} sin(k pi t / T).
// The sine basis vanishes at both ends, so the boundary is exact for every
// coefficient choice. Coefficients are stored as a K x 8 matrix whose column
// 2*i + d holds mode amplitudes of body i, coordinate d.
struct DiscretePath {
    BoundaryParams bp;
    int modes = 0;
    Eigen::MatrixXd coeffs;  // K x 8
    Configuration qstart = Configuration::Zero();
    Configuration qend = Configuration::Zero();

    static DiscretePath zero(const BoundaryParams& bp, int modes);
};

// Positions and velocities of the basis rule at time t in [0, T].
std::pair<Configuration, Configuration> eval_path(const DiscretePath& path,
                                                  double t);

// Quadrature approximation of the action of the path. The kinetic term is
// evaluated by the sine basis' closed form; the potential is summed over the
// quadrature nodes. Throws NearCollision when a node pair distance falls
// below the hard guard of 1e-6.
double action_value(const DiscretePath& path, const MassSystem& ms,
                    const QuadratureRule& quad);

// Exact derivative of the discretized action with respect to every sine
// coefficient, shaped like DiscretePath::coeffs.
Eigen::MatrixXd action_gradient(const DiscretePath& path, const MassSystem& ms,
                                const QuadratureRule& quad);

// Minimum pairwise separation over equispaced samples of the path.
double min_separation(const DiscretePath& path, int samples);

struct InnerOptions {
    int modes = 32;
    int quad_nodes = 512;
    double gtol = 1e-8;      // sup-norm of the coefficient gradient
    int max_iters = 2000;
    int restarts = 3;        // jittered restarts on stagnation or flagged runs
    double jitter_scale = 1e-2;
    double node_guard = 1e-3;  // below this the quadrature is untrusted
};

struct InnerResult {
    DiscretePath path;
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;       // final sup-norm
    double min_separation = 0.0;  // over nodes and a dense sample
};

// Realizes the inner minimum of the action over the fiber of paths pinned at
// Qstart(a), Qend(a, theta): preconditioned L-BFGS with a Wolfe line search,
// starting from the straight path (or the warm coefficients when those have
// lower action). Throws CollisionPath when every restart ends below the node
// guard, which signals a collision-bound boundary vector.
InnerResult inner_minimize(const BoundaryParams& bp, const MassSystem& ms,
                           const InnerOptions& opts = {},
                           const Eigen::MatrixXd* warm_coeffs = nullptr);

}  // namespace spbc
