#include "spbc/outersolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace spbc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double simplex_diameter(const std::vector<Vector6>& verts) {
    double d = 0.0;
    for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t j = i + 1; j < verts.size(); ++j)
            d = std::max(d, (verts[i] - verts[j]).norm());
    return d;
}

}  // namespace

OuterObjective::OuterObjective(RotationAngle theta, double T,
                               const MassSystem& ms, const InnerOptions& inner)
    : theta_(theta), T_(T), ms_(ms), inner_(inner) {}

InnerResult OuterObjective::solve(const Vector6& a, bool cold) {
    BoundaryParams bp;
    bp.a = a;
    bp.T = T_;
    bp.theta = theta_;
    ++evaluations_;

    const Eigen::MatrixXd* warm = nullptr;
    if (!cold && !cache_.empty()) {
        double best = kInf;
        for (const auto& [ca, cc] : cache_) {
            const double d = (ca - a).norm();
            if (d < best) {
                best = d;
                warm = &cc;
            }
        }
    }
    InnerResult res = inner_minimize(bp, ms_, inner_, warm);
    if (res.converged) {
        cache_.emplace_back(a, res.path.coeffs);
        if (cache_.size() > 48) cache_.erase(cache_.begin());
    }
    return res;
}

double OuterObjective::operator()(const Vector6& a) {
    try {
        return solve(a).value;
    } catch (const CollisionPath&) {
        return kInf;
    }
}

OuterResult outer_minimize(const Vector6& seed, RotationAngle theta, double T,
                           const MassSystem& ms, const OuterOptions& opts) {
    OuterObjective obj(theta, T, ms, opts.inner);
    OuterResult out;

    // Phase 1: Nelder-Mead simplex descent.
    const int n = 6;
    std::vector<Vector6> verts(n + 1);
    std::vector<double> fval(n + 1);
    verts[0] = seed;
    fval[0] = obj(seed);
    for (int i = 0; i < n; ++i) {
        Vector6 v = seed;
        v[i] += opts.init_spread * (1.0 + std::abs(seed[i]));
        verts[i + 1] = v;
        fval[i + 1] = obj(v);
    }

    bool simplex_ok = false;
    int iters = 0;
    while (obj.evaluations() < opts.max_evals) {
        ++iters;
        std::vector<int> order(n + 1);
        for (int i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return fval[a] < fval[b]; });
        std::vector<Vector6> vs(n + 1);
        std::vector<double> fs(n + 1);
        for (int i = 0; i <= n; ++i) {
            vs[i] = verts[order[i]];
            fs[i] = fval[order[i]];
        }
        verts = vs;
        fval = fs;

        out.simplex_diameter = simplex_diameter(verts);
        if (out.simplex_diameter < opts.simplex_tol) {
            simplex_ok = true;
            break;
        }

        Vector6 centroid = Vector6::Zero();
        for (int i = 0; i < n; ++i) centroid += verts[i];
        centroid /= n;

        const Vector6 xr = centroid + (centroid - verts[n]);
        const double fr = obj(xr);
        if (fr < fval[0]) {
            const Vector6 xe = centroid + 2.0 * (centroid - verts[n]);
            const double fe = obj(xe);
            if (fe < fr) {
                verts[n] = xe;
                fval[n] = fe;
            } else {
                verts[n] = xr;
                fval[n] = fr;
            }
        } else if (fr < fval[n - 1]) {
            verts[n] = xr;
            fval[n] = fr;
        } else {
            const bool outside = fr < fval[n];
            const Vector6 xc =
                centroid + (outside ? 0.5 : -0.5) * (centroid - verts[n]);
            const double fc = obj(xc);
            if (fc < std::min(fr, fval[n])) {
                verts[n] = xc;
                fval[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    verts[i] = verts[0] + 0.5 * (verts[i] - verts[0]);
                    fval[i] = obj(verts[i]);
                }
            }
        }
    }
    out.simplex_iterations = iters;

    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (fval[i] < fval[best]) best = i;
    Vector6 a = verts[best];
    double fa = fval[best];

    // Phase 2: quasi-Newton polish on central finite differences.
    const auto fd_gradient = [&](const Vector6& x) {
        Vector6 g;
        for (int i = 0; i < 6; ++i) {
            const double h = 1e-6 * (1.0 + std::abs(x[i]));
            Vector6 xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            g[i] = (obj(xp) - obj(xm)) / (2.0 * h);
        }
        return g;
    };

    Eigen::Matrix<double, 6, 6> H = Eigen::Matrix<double, 6, 6>::Identity();
    Vector6 g = fd_gradient(a);
    bool polish_ok = g.cwiseAbs().maxCoeff() < opts.polish_gtol;
    int piters = 0;
    while (!polish_ok && piters < opts.polish_max_iters &&
           obj.evaluations() < opts.max_evals) {
        ++piters;
        Vector6 p = -H * g;
        if (g.dot(p) >= 0.0) {
            H.setIdentity();
            p = -g;
        }
        double step = 1.0;
        double fn = kInf;
        Vector6 an;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            an = a + step * p;
            fn = obj(an);
            if (std::isfinite(fn) && fn <= fa + 1e-4 * step * g.dot(p)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        const Vector6 gn = fd_gradient(an);
        const Vector6 s = an - a, y = gn - g;
        const double sy = s.dot(y);
        if (sy > 1e-12) {
            // BFGS update of the inverse Hessian approximation.
            const Eigen::Matrix<double, 6, 6> I =
                Eigen::Matrix<double, 6, 6>::Identity();
            const Eigen::Matrix<double, 6, 6> V =
                I - (s * y.transpose()) / sy;
            H = V * H * V.transpose() + (s * s.transpose()) / sy;
        }
        a = an;
        fa = fn;
        g = gn;
        polish_ok = g.cwiseAbs().maxCoeff() < opts.polish_gtol;
    }
    out.polish_iterations = piters;
    out.polish_grad_norm = g.cwiseAbs().maxCoeff();

    if (!simplex_ok && !polish_ok) {
        throw Stalled("outer minimization exhausted its evaluation budget");
    }

    // Cold re-solve so the recorded value carries no warm-start bias.
    InnerResult fin = obj.solve(a, /*cold=*/true);
    out.a_star = a;
    out.value = fin.value;
    out.inner_path = fin.path;
    out.evaluations = obj.evaluations();
    out.converged = polish_ok;
    return out;
}

std::vector<std::pair<double, double>> coercivity_probe(
    const Vector6& a, const std::vector<double>& scales, RotationAngle theta,
    double T, const MassSystem& ms, const InnerOptions& inner) {
    const double th = theta.value();
    for (double bad : {kPi / 4.0, kPi / 2.0, 3.0 * kPi / 4.0}) {
        if (std::abs(th - bad) < 1e-9) {
            throw DegenerateAngle(
                "start and end families intersect; probe undefined");
        }
    }
    OuterObjective obj(theta, T, ms, inner);
    std::vector<std::pair<double, double>> out;
    out.reserve(scales.size());
    for (double s : scales) out.emplace_back(s, obj(s * a));
    return out;
}

}  // namespace spbc
