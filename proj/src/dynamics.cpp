#include "spbc/dynamics.hpp"

#include <cmath>

namespace spbc {

double potential(const Configuration& q, const MassSystem& ms) {
    double u = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            const double d = (q.row(i) - q.row(j)).norm();
            if (d == 0.0) throw CollisionError("coincident bodies in potential");
            u += ms.m[i] * ms.m[j] / d;
        }
    }
    return u;
}

Configuration accelerations(const Configuration& q, const MassSystem& ms) {
    Configuration a = Configuration::Zero();
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            const Eigen::RowVector2d dij = q.row(j) - q.row(i);
            const double d = dij.norm();
            if (d == 0.0)
                throw CollisionError("coincident bodies in accelerations");
            const Eigen::RowVector2d g = dij / (d * d * d);
            a.row(i) += ms.m[j] * g;
            a.row(j) -= ms.m[i] * g;
        }
    }
    return a;
}

double total_energy(const PhaseState& s, const MassSystem& ms) {
    double kin = 0.0;
    for (int i = 0; i < 4; ++i)
        kin += 0.5 * ms.m[i] * s.v.row(i).squaredNorm();
    return kin - potential(s.q, ms);
}

double angular_momentum(const PhaseState& s, const MassSystem& ms) {
    double L = 0.0;
    for (int i = 0; i < 4; ++i) {
        L += ms.m[i] * (s.q(i, 0) * s.v(i, 1) - s.q(i, 1) * s.v(i, 0));
    }
    return L;
}

Eigen::VectorXd pack_state(const PhaseState& s) {
    Eigen::VectorXd y(16);
    for (int i = 0; i < 4; ++i) {
        y[2 * i] = s.q(i, 0);
        y[2 * i + 1] = s.q(i, 1);
        y[8 + 2 * i] = s.v(i, 0);
        y[8 + 2 * i + 1] = s.v(i, 1);
    }
    return y;
}

PhaseState unpack_state(const Eigen::VectorXd& y) {
    PhaseState s;
    for (int i = 0; i < 4; ++i) {
        s.q(i, 0) = y[2 * i];
        s.q(i, 1) = y[2 * i + 1];
        s.v(i, 0) = y[8 + 2 * i];
        s.v(i, 1) = y[8 + 2 * i + 1];
    }
    return s;
}

PhaseState Trajectory::at(double t) const { return unpack_state(sol_.eval(t)); }

std::vector<std::pair<double, PhaseState>> Trajectory::samples(int n) const {
    std::vector<std::pair<double, PhaseState>> out;
    out.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double t =
            t_begin() + (t_end() - t_begin()) * static_cast<double>(i) / n;
        out.emplace_back(t, at(t));
    }
    return out;
}

Trajectory integrate_flow(const PhaseState& s0, const MassSystem& ms,
                          double t0, double t1, const FlowOptions& opts) {
    if (min_pair_distance(s0.q) < opts.collision_radius) {
        throw CollisionError("initial state inside collision guard");
    }
    const double guard = opts.collision_radius;
    OdeRhs rhs = [&ms, guard](double, const Eigen::VectorXd& y,
                              Eigen::VectorXd& dy) {
        const PhaseState s = unpack_state(y);
        if (min_pair_distance(s.q) < guard) {
            throw CollisionError("separation below collision guard");
        }
        const Configuration a = accelerations(s.q, ms);
        dy.resize(16);
        for (int i = 0; i < 4; ++i) {
            dy[2 * i] = s.v(i, 0);
            dy[2 * i + 1] = s.v(i, 1);
            dy[8 + 2 * i] = a(i, 0);
            dy[8 + 2 * i + 1] = a(i, 1);
        }
    };
    OdeOptions oo;
    oo.abs_tol = opts.abs_tol;
    oo.rel_tol = opts.rel_tol;
    return Trajectory(integrate_ode(rhs, t0, t1, pack_state(s0), oo));
}

}  // namespace spbc
