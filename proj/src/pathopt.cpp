#include "spbc/pathopt.hpp"

#include <cmath>
#include <deque>
#include <numbers>
#include <random>

namespace spbc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHardGuard = 1e-6;

Configuration config_from_row(const Eigen::Matrix<double, 1, 8>& r) {
    Configuration q;
    for (int i = 0; i < 4; ++i) {
        q(i, 0) = r[2 * i];
        q(i, 1) = r[2 * i + 1];
    }
    return q;
}

// Precomputed quantities for repeated action evaluations on one fiber.
struct ActionProblem {
    double T;
    int K, M;
    Configuration qs, qe;
    Eigen::Matrix<double, 1, 8> delta;  // Qend - Qstart, flattened
    Eigen::MatrixXd sin_basis;          // M x K
    Eigen::VectorXd weights;            // M
    Eigen::VectorXd nodes;              // M
    const MassSystem* ms;

    ActionProblem(const Configuration& qstart, const Configuration& qend,
                  double duration, const MassSystem& mass,
                  const QuadratureRule& quad, int modes)
        : T(duration), K(modes), M(static_cast<int>(quad.nodes.size())),
          qs(qstart), qe(qend), ms(&mass) {
        for (int i = 0; i < 4; ++i) {
            delta[2 * i] = qe(i, 0) - qs(i, 0);
            delta[2 * i + 1] = qe(i, 1) - qs(i, 1);
        }
        nodes = quad.nodes;
        weights = quad.weights;
        sin_basis.resize(M, K);
        for (int n = 0; n < M; ++n) {
            for (int k = 0; k < K; ++k) {
                sin_basis(n, k) = std::sin((k + 1) * kPi * nodes[n] / T);
            }
        }
    }

    // Action value, optionally its coefficient gradient, and the minimum
    // node pair distance encountered.
    double eval(const Eigen::MatrixXd& C, Eigen::MatrixXd* grad,
                double* min_dist) const {
        double kin = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double dx = delta[2 * i], dy = delta[2 * i + 1];
            kin += ms->m[i] * (dx * dx + dy * dy) / (2.0 * T);
        }
        for (int k = 0; k < K; ++k) {
            const double f = kPi * kPi * (k + 1) * (k + 1) / (4.0 * T);
            for (int i = 0; i < 4; ++i) {
                kin += ms->m[i] * f *
                       (C(k, 2 * i) * C(k, 2 * i) +
                        C(k, 2 * i + 1) * C(k, 2 * i + 1));
            }
        }

        // Sine part of the positions at the nodes; the line part is added
        // per node below.
        const Eigen::MatrixXd pos = sin_basis * C;
        Eigen::MatrixXd weighted_du;
        if (grad) weighted_du.setZero(M, 8);

        double pot = 0.0;
        double dmin = std::numeric_limits<double>::infinity();
        Eigen::Matrix<double, 1, 8> base;
        for (int i = 0; i < 4; ++i) {
            base[2 * i] = qs(i, 0);
            base[2 * i + 1] = qs(i, 1);
        }
        for (int n = 0; n < M; ++n) {
            const double s = nodes[n] / T;
            Eigen::Matrix<double, 1, 8> row = base + s * delta;
            row += pos.row(n);
            const Configuration q = config_from_row(row);
            double u = 0.0;
            Configuration du = Configuration::Zero();
            for (int i = 0; i < 4; ++i) {
                for (int j = i + 1; j < 4; ++j) {
                    const Eigen::RowVector2d dij = q.row(i) - q.row(j);
                    const double d = dij.norm();
                    dmin = std::min(dmin, d);
                    if (d < kHardGuard) {
                        if (min_dist) *min_dist = dmin;
                        throw NearCollision(
                            "node separation below the 1e-6 action guard");
                    }
                    const double mm = ms->m[i] * ms->m[j];
                    u += mm / d;
                    const Eigen::RowVector2d g = -mm * dij / (d * d * d);
                    du.row(i) += g;
                    du.row(j) -= g;
                }
            }
            pot += weights[n] * u;
            if (grad) {
                for (int i = 0; i < 4; ++i) {
                    weighted_du(n, 2 * i) = weights[n] * du(i, 0);
                    weighted_du(n, 2 * i + 1) = weights[n] * du(i, 1);
                }
            }
        }
        if (min_dist) *min_dist = dmin;

        if (grad) {
            *grad = sin_basis.transpose() * weighted_du;
            for (int k = 0; k < K; ++k) {
                const double f = kPi * kPi * (k + 1) * (k + 1) / (2.0 * T);
                for (int i = 0; i < 4; ++i) {
                    (*grad)(k, 2 * i) += ms->m[i] * f * C(k, 2 * i);
                    (*grad)(k, 2 * i + 1) += ms->m[i] * f * C(k, 2 * i + 1);
                }
            }
        }
        return kin + pot;
    }
};

// Remove the mass-weighted mean across bodies from every mode so centered
// endpoints stay centered along the whole path.
void project_center_of_mass(Eigen::MatrixXd& C, const MassSystem& ms) {
    const double mt = ms.total();
    for (int k = 0; k < C.rows(); ++k) {
        for (int d = 0; d < 2; ++d) {
            double mean = 0.0;
            for (int i = 0; i < 4; ++i) mean += ms.m[i] * C(k, 2 * i + d);
            mean /= mt;
            for (int i = 0; i < 4; ++i) C(k, 2 * i + d) -= mean;
        }
    }
}

struct LbfgsPair {
    Eigen::VectorXd s, y;
    double rho;
};

}  // namespace

DiscretePath DiscretePath::zero(const BoundaryParams& bp, int modes) {
    DiscretePath p;
    p.bp = bp;
    p.modes = modes;
    p.coeffs = Eigen::MatrixXd::Zero(modes, 8);
    p.qstart = build_qstart(bp.a[0], bp.a[1], bp.a[2]);
    p.qend = build_qend(bp.a[3], bp.a[4], bp.a[5], bp.theta.value());
    return p;
}

std::pair<Configuration, Configuration> eval_path(const DiscretePath& path,
                                                  double t) {
    const double T = path.bp.T;
    if (t < -1e-12 || t > T + 1e-12) {
        throw OutOfDomain("path evaluated outside [0, T]");
    }
    t = std::clamp(t, 0.0, T);
    Configuration pos = path.qstart + (t / T) * (path.qend - path.qstart);
    Configuration vel = (path.qend - path.qstart) / T;
    for (int k = 0; k < path.modes; ++k) {
        const double om = (k + 1) * kPi / T;
        const double sk = std::sin(om * t), ck = std::cos(om * t);
        for (int i = 0; i < 4; ++i) {
            pos(i, 0) += path.coeffs(k, 2 * i) * sk;
            pos(i, 1) += path.coeffs(k, 2 * i + 1) * sk;
            vel(i, 0) += path.coeffs(k, 2 * i) * om * ck;
            vel(i, 1) += path.coeffs(k, 2 * i + 1) * om * ck;
        }
    }
    return {pos, vel};
}

double action_value(const DiscretePath& path, const MassSystem& ms,
                    const QuadratureRule& quad) {
    ActionProblem prob(path.qstart, path.qend, path.bp.T, ms, quad, path.modes);
    return prob.eval(path.coeffs, nullptr, nullptr);
}

Eigen::MatrixXd action_gradient(const DiscretePath& path, const MassSystem& ms,
                                const QuadratureRule& quad) {
    ActionProblem prob(path.qstart, path.qend, path.bp.T, ms, quad, path.modes);
    Eigen::MatrixXd grad;
    prob.eval(path.coeffs, &grad, nullptr);
    return grad;
}

double min_separation(const DiscretePath& path, int samples) {
    if (samples < 2) throw OutOfDomain("need at least two samples");
    double dmin = std::numeric_limits<double>::infinity();
    for (int n = 0; n < samples; ++n) {
        const double t = path.bp.T * static_cast<double>(n) / (samples - 1);
        const auto [q, v] = eval_path(path, t);
        (void)v;
        dmin = std::min(dmin, min_pair_distance(q));
    }
    return dmin;
}

InnerResult inner_minimize(const BoundaryParams& bp, const MassSystem& ms,
                           const InnerOptions& opts,
                           const Eigen::MatrixXd* warm_coeffs) {
    const int K = opts.modes;
    const QuadratureRule quad =
        QuadratureRule::gauss_legendre(opts.quad_nodes, 0.0, bp.T);
    const Configuration qs = build_qstart(bp.a[0], bp.a[1], bp.a[2]);
    const Configuration qe =
        build_qend(bp.a[3], bp.a[4], bp.a[5], bp.theta.value());
    ActionProblem prob(qs, qe, bp.T, ms, quad, K);

    // Diagonal preconditioner from the exact kinetic Hessian.
    Eigen::VectorXd h0(K * 8);
    for (int c = 0; c < 8; ++c) {
        for (int k = 0; k < K; ++k) {
            const double kin =
                ms.m[c / 2] * kPi * kPi * (k + 1) * (k + 1) / (2.0 * bp.T);
            h0[c * K + k] = 1.0 / (kin + 1.0);
        }
    }

    const auto to_vec = [K](const Eigen::MatrixXd& C) {
        return Eigen::VectorXd(
            Eigen::Map<const Eigen::VectorXd>(C.data(), K * 8));
    };
    const auto to_mat = [K](const Eigen::VectorXd& x) {
        return Eigen::MatrixXd(
            Eigen::Map<const Eigen::MatrixXd>(x.data(), K, 8));
    };

    // Evaluations that trip the hard guard count as infinitely bad.
    const auto safe_eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g,
                               double* dmin) -> double {
        try {
            Eigen::MatrixXd grad;
            const Eigen::MatrixXd C = to_mat(x);
            const double f = prob.eval(C, g ? &grad : nullptr, dmin);
            if (g) *g = to_vec(grad);
            return f;
        } catch (const NearCollision&) {
            return std::numeric_limits<double>::infinity();
        } catch (const CollisionError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    Eigen::MatrixXd start = Eigen::MatrixXd::Zero(K, 8);
    const double zero_value = safe_eval(to_vec(start), nullptr, nullptr);
    if (warm_coeffs && warm_coeffs->rows() == K && warm_coeffs->cols() == 8) {
        Eigen::MatrixXd w = *warm_coeffs;
        project_center_of_mass(w, ms);
        const double wv = safe_eval(to_vec(w), nullptr, nullptr);
        if (wv < zero_value) start = w;
    }

    std::mt19937_64 rng(0x5bbc0001u);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    InnerResult best;
    best.value = std::numeric_limits<double>::infinity();
    bool any_clean = false;

    for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
        Eigen::MatrixXd C0 = start;
        if (attempt > 0) {
            for (int k = 0; k < C0.rows(); ++k)
                for (int c = 0; c < 8; ++c)
                    C0(k, c) += opts.jitter_scale * unif(rng);
            project_center_of_mass(C0, ms);
        }

        Eigen::VectorXd x = to_vec(C0), g(K * 8);
        double f = safe_eval(x, &g, nullptr);
        if (!std::isfinite(f)) continue;

        std::deque<LbfgsPair> mem;
        int iter = 0;
        bool stagnated = false;
        for (; iter < opts.max_iters; ++iter) {
            if (g.cwiseAbs().maxCoeff() < opts.gtol) break;

            // Two-loop recursion with the kinetic diagonal as seed.
            Eigen::VectorXd q = g;
            std::vector<double> alpha(mem.size());
            for (int i = static_cast<int>(mem.size()) - 1; i >= 0; --i) {
                alpha[i] = mem[i].rho * mem[i].s.dot(q);
                q -= alpha[i] * mem[i].y;
            }
            Eigen::VectorXd p = -(h0.array() * q.array()).matrix();
            for (std::size_t i = 0; i < mem.size(); ++i) {
                const double beta = mem[i].rho * mem[i].y.dot(p);
                p += (alpha[i] - beta) * mem[i].s;
            }
            double dg = g.dot(p);
            if (dg >= 0.0) {  // not a descent direction; drop the memory
                mem.clear();
                p = -(h0.array() * g.array()).matrix();
                dg = g.dot(p);
            }

            // Wolfe line search (backtracking + one expansion pass).
            constexpr double c1 = 1e-4, c2 = 0.9;
            double step = 1.0;
            double f_new = 0.0;
            Eigen::VectorXd x_new, g_new(K * 8);
            bool ok = false;
            for (int ls = 0; ls < 40; ++ls) {
                x_new = x + step * p;
                f_new = safe_eval(x_new, &g_new, nullptr);
                if (std::isfinite(f_new) && f_new <= f + c1 * step * dg) {
                    if (g_new.dot(p) >= c2 * dg) {
                        ok = true;
                        break;
                    }
                    // Sufficient decrease but curvature too small: expand.
                    const double wider = step * 2.0;
                    Eigen::VectorXd x_try = x + wider * p, g_try(K * 8);
                    const double f_try = safe_eval(x_try, &g_try, nullptr);
                    if (std::isfinite(f_try) && f_try <= f + c1 * wider * dg) {
                        step = wider;
                        x_new.swap(x_try);
                        g_new.swap(g_try);
                        f_new = f_try;
                        continue;
                    }
                    ok = true;  // accept the Armijo point
                    break;
                }
                step *= 0.4;
            }
            if (!ok || !(f_new < f)) {
                stagnated = g.cwiseAbs().maxCoeff() >= opts.gtol;
                break;
            }

            LbfgsPair pr;
            pr.s = x_new - x;
            pr.y = g_new - g;
            const double sy = pr.s.dot(pr.y);
            if (sy > 1e-14 * pr.s.norm() * pr.y.norm()) {
                pr.rho = 1.0 / sy;
                mem.push_back(std::move(pr));
                if (mem.size() > 12) mem.pop_front();
            }
            x.swap(x_new);
            g.swap(g_new);
            f = f_new;
        }

        DiscretePath path = DiscretePath::zero(bp, K);
        path.coeffs = to_mat(x);
        double node_min = 0.0;
        const double fv = safe_eval(x, nullptr, &node_min);
        const double sep = std::min(node_min, min_separation(path, 1024));
        const bool flagged = sep <= opts.node_guard;
        const bool converged =
            std::isfinite(fv) && g.cwiseAbs().maxCoeff() < opts.gtol;

        if (!flagged) any_clean = true;
        if (std::isfinite(fv) && !flagged &&
            (fv < best.value || (converged && !best.converged))) {
            best.path = std::move(path);
            best.value = fv;
            best.converged = converged;
            best.iterations = iter;
            best.grad_norm = g.cwiseAbs().maxCoeff();
            best.min_separation = sep;
        }
        if (best.converged && !stagnated) break;
    }

    if (!any_clean) {
        throw CollisionPath(
            "every inner restart ran into the near-collision guard");
    }
    return best;
}

}  // namespace spbc
