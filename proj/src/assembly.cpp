#include "spbc/assembly.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>

namespace spbc {

namespace {

constexpr double kPi = std::numbers::pi;

// Row i of sigma^k(q) is row (i + k) mod 4 of q; sigma = [2, 3, 4, 1].
Configuration permute_sigma(const Configuration& q, int k) {
    Configuration out;
    for (int i = 0; i < 4; ++i) out.row(i) = q.row((i + k) % 4);
    return out;
}

// The t -> 2T - t reflection swaps bodies 1<->2 and 3<->4.
Configuration swap_pairs(const Configuration& q) {
    Configuration out;
    out.row(0) = q.row(1);
    out.row(1) = q.row(0);
    out.row(2) = q.row(3);
    out.row(3) = q.row(2);
    return out;
}

double positive_fmod(double t, double period) {
    double r = std::fmod(t, period);
    if (r < 0.0) r += period;
    return r;
}

}  // namespace

std::string to_string(OrbitKind kind) {
    switch (kind) {
        case OrbitKind::QuasiPeriodic: return "quasi-periodic";
        case OrbitKind::NonChoreographic: return "non-choreographic";
        case OrbitKind::ChoreographicForward: return "simple-choreographic-forward";
        case OrbitKind::DoubleChoreographic: return "double-choreographic";
        case OrbitKind::ChoreographicReverse: return "simple-choreographic-reverse";
    }
    return "unknown";
}

Classification classify_angle(const RotationAngle& theta) {
    Classification c;
    if (!theta.is_rational()) {
        c.kind = OrbitKind::QuasiPeriodic;
        return c;
    }
    const long q = theta.q();
    switch (q % 4) {
        case 0:
            c.kind = OrbitKind::NonChoreographic;
            c.curves = 4;
            c.sides_per_curve = static_cast<int>(q / 4);
            c.period_multiple = 2 * q;
            break;
        case 1:
            c.kind = OrbitKind::ChoreographicForward;
            c.curves = 1;
            c.sides_per_curve = static_cast<int>(q);
            c.period_multiple = 8 * q;
            c.chase_order = "q1->q2->q3->q4->q1";
            break;
        case 2:
            c.kind = OrbitKind::DoubleChoreographic;
            c.curves = 2;
            c.sides_per_curve = static_cast<int>(q / 2);
            c.period_multiple = 4 * q;
            c.chase_order = "q1<->q3, q2<->q4";
            break;
        default:
            c.kind = OrbitKind::ChoreographicReverse;
            c.curves = 1;
            c.sides_per_curve = static_cast<int>(q);
            c.period_multiple = 8 * q;
            c.chase_order = "q1->q4->q3->q2->q1";
            break;
    }
    return c;
}

OrbitPiece OrbitPiece::from_path(const DiscretePath& path) {
    OrbitPiece p;
    p.T_ = path.bp.T;
    p.eval_ = [path](double s, Configuration& q, Configuration& v) {
        auto [qq, vv] = eval_path(path, s);
        q = qq;
        v = vv;
    };
    return p;
}

OrbitPiece OrbitPiece::from_trajectory(const Trajectory& traj) {
    if (std::abs(traj.t_begin()) > 1e-12 || traj.t_end() <= traj.t_begin()) {
        throw OutOfDomain("piece trajectory must span [0, T]");
    }
    OrbitPiece p;
    p.T_ = traj.t_end();
    auto shared = std::make_shared<Trajectory>(traj);
    p.eval_ = [shared](double s, Configuration& q, Configuration& v) {
        const PhaseState st = shared->at(s);
        q = st.q;
        v = st.v;
    };
    return p;
}

void OrbitPiece::eval(double s, Configuration& q, Configuration& v) const {
    if (!eval_) throw Error("empty orbit piece");
    eval_(std::clamp(s, 0.0, T_), q, v);
}

void Orbit::state_at(double t, Configuration& q, Configuration& v) const {
    const bool periodic = classification.period_multiple > 0;
    if (t < 0.0 || t > t_total) {
        if (!periodic) {
            throw OutOfDomain("time outside the assembled quasi-periodic span");
        }
        t = positive_fmod(t, static_cast<double>(classification.period_multiple) * T);
    }
    if (cycles == 0) {  // just the piece
        piece.eval(t, q, v);
        return;
    }
    int k = static_cast<int>(std::floor(t / (2.0 * T)));
    if (k >= cycles) k = cycles - 1;
    const double tau = t - 2.0 * k * T;

    Configuration w, wdot;
    if (tau <= T) {
        piece.eval(tau, w, wdot);
    } else {
        Configuration qq, vv;
        piece.eval(2.0 * T - tau, qq, vv);
        const Mat2 R2 = rotation_matrix(2.0 * theta.value());
        w = reflect_y(swap_pairs(qq)) * R2;
        wdot = -(reflect_y(swap_pairs(vv)) * R2);
    }
    double angle;
    if (theta.is_rational()) {
        // Exact reduction of 2 k theta modulo 2 pi keeps long extensions tight.
        const long m = (2L * k * theta.p()) % (2L * theta.q());
        angle = static_cast<double>(m) * kPi / static_cast<double>(theta.q());
    } else {
        angle = 2.0 * k * theta.value();
    }
    const Mat2 Rk = rotation_matrix(angle);
    q = permute_sigma(w, k % 4) * Rk;
    v = permute_sigma(wdot, k % 4) * Rk;
}

PhaseState Orbit::state_at(double t) const {
    PhaseState s;
    state_at(t, s.q, s.v);
    return s;
}

Eigen::Matrix<double, 8, 1> transversality_residuals(const Configuration& vT,
                                                     double theta) {
    const double c2 = std::cos(2.0 * theta), s2 = std::sin(2.0 * theta);
    Eigen::Matrix<double, 8, 1> A;
    // Pairs (1,2), (2,1), (3,4), (4,3); partner velocity rotated by 2 theta.
    const auto pair_res = [&](int i, int j, int out) {
        A[out] = vT(i, 0) - vT(j, 0) * c2 + vT(j, 1) * s2;
        A[out + 1] = vT(i, 1) + vT(j, 0) * s2 + vT(j, 1) * c2;
    };
    pair_res(0, 1, 0);
    pair_res(1, 0, 2);
    pair_res(2, 3, 4);
    pair_res(3, 2, 6);
    return A;
}

JunctionReport junction_residuals(const Orbit& orbit) {
    JunctionReport rep;
    const double T = orbit.T;
    const Mat2 R2 = rotation_matrix(2.0 * orbit.theta.value());

    Configuration qT, vT, q0, v0;
    orbit.piece.eval(T, qT, vT);
    orbit.piece.eval(0.0, q0, v0);

    // Junction at t = T: piece end against the reflected continuation.
    const Configuration qTr = reflect_y(swap_pairs(qT)) * R2;
    const Configuration vTr = -(reflect_y(swap_pairs(vT)) * R2);
    // Junction at t = 2T: reflected block end against the permuted restart.
    const Configuration q2l = reflect_y(swap_pairs(q0)) * R2;
    const Configuration v2l = -(reflect_y(swap_pairs(v0)) * R2);
    const Configuration q2r = permute_sigma(q0, 1) * R2;
    const Configuration v2r = permute_sigma(v0, 1) * R2;

    for (int i = 0; i < 4; ++i) {
        rep.pos_res = std::max(rep.pos_res, (qT.row(i) - qTr.row(i)).norm());
        rep.pos_res = std::max(rep.pos_res, (q2l.row(i) - q2r.row(i)).norm());
        rep.vel_res = std::max(rep.vel_res, (vT.row(i) - vTr.row(i)).norm());
        rep.vel_res = std::max(rep.vel_res, (v2l.row(i) - v2r.row(i)).norm());
    }
    rep.transversality = transversality_residuals(vT, orbit.theta.value());
    return rep;
}

Orbit extend_orbit(const OrbitPiece& piece, const RotationAngle& theta,
                   int cycles, int samples_per_T) {
    Orbit orbit;
    orbit.theta = theta;
    orbit.T = piece.T();
    orbit.classification = classify_angle(theta);
    orbit.piece = piece;
    if (cycles < 0) {
        cycles = orbit.classification.period_multiple > 0
                     ? static_cast<int>(orbit.classification.period_multiple / 2)
                     : 20;
    }
    orbit.cycles = cycles;
    orbit.t_total = cycles == 0 ? orbit.T : 2.0 * cycles * orbit.T;

    const int nsteps = cycles == 0 ? samples_per_T : 2 * cycles * samples_per_T;
    orbit.samples.reserve(nsteps + 1);
    for (int j = 0; j <= nsteps; ++j) {
        const double t = orbit.t_total * static_cast<double>(j) / nsteps;
        orbit.samples.emplace_back(t, orbit.state_at(t));
    }
    orbit.junctions = junction_residuals(orbit);

    if (orbit.classification.period_multiple > 0 &&
        2L * cycles == orbit.classification.period_multiple) {
        const PhaseState s0 = orbit.state_at(0.0);
        const PhaseState s1 = orbit.state_at(orbit.t_total);
        orbit.closure = std::max((s1.q - s0.q).cwiseAbs().maxCoeff(),
                                 (s1.v - s0.v).cwiseAbs().maxCoeff());
    } else {
        orbit.closure = std::numeric_limits<double>::quiet_NaN();
    }
    return orbit;
}

CheckReport verify_choreography(const Orbit& orbit, double tol) {
    const Classification& cls = orbit.classification;
    if (cls.period_multiple == 0) {
        throw NotPeriodic("choreography checks need a periodic orbit");
    }
    const long Q = orbit.theta.q();
    const double shift = 2.0 * Q * orbit.T;
    const double period = cls.period_multiple * orbit.T;

    std::vector<std::pair<int, int>> relations;  // q_a(t + shift) = q_b(t)
    switch (cls.kind) {
        case OrbitKind::NonChoreographic:
            relations = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
            break;
        case OrbitKind::ChoreographicForward:
            relations = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
            break;
        case OrbitKind::DoubleChoreographic:
            relations = {{0, 2}, {2, 0}, {1, 3}, {3, 1}};
            break;
        case OrbitKind::ChoreographicReverse:
            relations = {{0, 3}, {3, 2}, {2, 1}, {1, 0}};
            break;
        default:
            throw NotPeriodic("no chase relations for this kind");
    }

    CheckReport rep;
    constexpr int kSamples = 200;
    for (int n = 0; n < kSamples; ++n) {
        const double t = period * static_cast<double>(n) / kSamples;
        const PhaseState st = orbit.state_at(t);
        const PhaseState sh = orbit.state_at(t + shift);
        for (const auto& [a, b] : relations) {
            const double e = (sh.q.row(a) - st.q.row(b)).norm();
            rep.max_error = std::max(rep.max_error, e);
        }
    }
    rep.pass = rep.max_error < tol;
    rep.detail = "chase identities at 200 sample times";
    return rep;
}

namespace {

// Residual of the best rigid-rotation fit of config to the start template
// rows (a1,a2), (0,-a3), (-a1,a2), (0,-2a2+a3).
double start_shape_residual(const Configuration& c) {
    const Vec2 d = (c.row(0) - c.row(2)).transpose();
    if (d.norm() < 1e-12) return std::numeric_limits<double>::infinity();
    const Mat2 R = rotation_matrix(std::atan2(d[1], d[0]));
    const Configuration a = c * R;  // q1 - q3 now along +x
    double r = std::abs(a(0, 1) - a(2, 1));
    r = std::max(r, std::abs(a(0, 0) + a(2, 0)));
    r = std::max(r, std::abs(a(1, 0)));
    r = std::max(r, std::abs(a(3, 0)));
    // Row 4 of the template is fixed by the center of mass.
    r = std::max(r, std::abs(a(3, 1) + 2.0 * a(0, 1) + a(1, 1)));
    return r;
}

// Residual of the best rigid-rotation fit to the trapezoid template rows
// (-a5,a4), (a5,a4), (-a6,-a4), (a6,-a4).
double trapezoid_shape_residual(const Configuration& c) {
    const Vec2 d = (c.row(1) - c.row(0)).transpose();
    if (d.norm() < 1e-12) return std::numeric_limits<double>::infinity();
    const Mat2 R = rotation_matrix(std::atan2(d[1], d[0]));
    const Configuration a = c * R;  // q2 - q1 now along +x
    double r = std::abs(a(0, 1) - a(1, 1));
    r = std::max(r, std::abs(a(0, 0) + a(1, 0)));
    r = std::max(r, std::abs(a(2, 1) - a(3, 1)));
    r = std::max(r, std::abs(a(2, 0) + a(3, 0)));
    r = std::max(r, std::abs(a(0, 1) + a(2, 1)));
    return r;
}

}  // namespace

CheckReport verify_symmetry(const Orbit& orbit, double tol,
                            const MassSystem& ms) {
    CheckReport rep;
    const double T = orbit.T;
    const bool periodic = orbit.classification.period_multiple > 0;

    // q(-t) comes from the periodic wraparound, or from backward integration
    // when the extension never closes.
    std::optional<Trajectory> back;
    if (!periodic) {
        back = integrate_flow(orbit.state_at(0.0), ms, 0.0, -2.0 * T,
                              FlowOptions{1e-12, 1e-12, 1e-9});
    }
    const auto negative = [&](double t) {
        return periodic ? orbit.state_at(-t) : back->at(-t);
    };

    constexpr int kSamples = 200;
    for (int n = 0; n <= kSamples; ++n) {
        const double t = 2.0 * T * static_cast<double>(n) / kSamples;
        const PhaseState plus = orbit.state_at(t);
        const PhaseState minus = negative(t);
        const Configuration mirrored = reflect_y(plus.q);
        rep.max_error =
            std::max(rep.max_error, (minus.q.row(0) - mirrored.row(2)).norm());
        rep.max_error =
            std::max(rep.max_error, (minus.q.row(1) - mirrored.row(1)).norm());
        rep.max_error =
            std::max(rep.max_error, (minus.q.row(2) - mirrored.row(0)).norm());
        rep.max_error =
            std::max(rep.max_error, (minus.q.row(3) - mirrored.row(3)).norm());
    }

    // Junction shapes within the assembled span. At t = 2kT the bodies play
    // sigma^k-permuted roles, so undo the permutation before fitting.
    const int kmax = std::min(orbit.cycles, 8);
    for (int k = 0; k <= kmax; ++k) {
        const int unshift = (4 - k % 4) % 4;
        const double te = 2.0 * k * T;
        if (te <= orbit.t_total) {
            const Configuration q = permute_sigma(orbit.state_at(te).q, unshift);
            rep.max_error = std::max(rep.max_error, start_shape_residual(q));
        }
        const double to = (2.0 * k + 1.0) * T;
        if (to <= orbit.t_total) {
            const Configuration q = permute_sigma(orbit.state_at(to).q, unshift);
            rep.max_error = std::max(rep.max_error, trapezoid_shape_residual(q));
        }
    }

    rep.pass = rep.max_error < tol;
    rep.detail = "time reflection plus junction shapes";
    return rep;
}

namespace {

PhaseState shooting_state(const Eigen::Matrix<double, 6, 1>& u) {
    PhaseState s;
    s.q = build_qstart(u[0], u[1], u[2]);
    s.v << u[3], u[4],
           u[5], 0.0,
           u[3], -u[4],
           -2.0 * u[3] - u[5], 0.0;
    return s;
}

Eigen::Matrix<double, 13, 1> shooting_residual(
    const Eigen::Matrix<double, 6, 1>& u, double theta, double T,
    const MassSystem& ms) {
    const PhaseState s0 = shooting_state(u);
    const Trajectory traj =
        integrate_flow(s0, ms, 0.0, T, FlowOptions{1e-13, 1e-13, 1e-9});
    const PhaseState sT = traj.at(T);
    const Configuration p = sT.q * rotation_matrix(-theta);
    Eigen::Matrix<double, 13, 1> r;
    r[0] = p(0, 0) + p(1, 0);
    r[1] = p(0, 1) - p(1, 1);
    r[2] = p(2, 0) + p(3, 0);
    r[3] = p(2, 1) - p(3, 1);
    r[4] = p(0, 1) + p(2, 1);
    r.segment<8>(5) = transversality_residuals(sT.v, theta);
    return r;
}

}  // namespace

ShootingResult shooting_refine(const Vector6& a_seed,
                               const RotationAngle& theta, double T,
                               const MassSystem& ms, double tol,
                               const DiscretePath* path_hint) {
    Eigen::Matrix<double, 6, 1> u;
    u.head<3>() = a_seed.head<3>();
    if (path_hint) {
        const auto [q0, v0] = eval_path(*path_hint, 0.0);
        (void)q0;
        u[3] = v0(0, 0);
        u[4] = v0(0, 1);
        u[5] = v0(1, 0);
    } else {
        BoundaryParams bp;
        bp.a = a_seed;
        bp.T = T;
        bp.theta = theta;
        const InnerResult inner = inner_minimize(bp, ms);
        const auto [q0, v0] = eval_path(inner.path, 0.0);
        (void)q0;
        u[3] = v0(0, 0);
        u[4] = v0(0, 1);
        u[5] = v0(1, 0);
    }

    const double th = theta.value();
    Eigen::Matrix<double, 13, 1> r = shooting_residual(u, th, T, ms);
    double rn = r.norm();
    int iters = 0;
    constexpr int kMaxIters = 60;
    while (rn >= tol && iters < kMaxIters) {
        ++iters;
        Eigen::Matrix<double, 13, 6> J;
        for (int i = 0; i < 6; ++i) {
            const double h = 1e-6 * (1.0 + std::abs(u[i]));
            Eigen::Matrix<double, 6, 1> up = u, um = u;
            up[i] += h;
            um[i] -= h;
            J.col(i) = (shooting_residual(up, th, T, ms) -
                        shooting_residual(um, th, T, ms)) /
                       (2.0 * h);
        }
        Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 13, 6>> qr(J);
        if (qr.rank() < 6) {
            throw JacobianSingular("shooting Jacobian is rank deficient");
        }
        const Eigen::Matrix<double, 6, 1> delta = qr.solve(-r);

        double step = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 10; ++ls) {
            const Eigen::Matrix<double, 6, 1> un = u + step * delta;
            const Eigen::Matrix<double, 13, 1> rnew =
                shooting_residual(un, th, T, ms);
            if (rnew.norm() < rn) {
                u = un;
                r = rnew;
                rn = rnew.norm();
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    if (rn >= tol) {
        throw NotConverged("shooting residual stalled at " + std::to_string(rn));
    }

    ShootingResult out;
    out.state = shooting_state(u);
    out.residual = rn;
    out.iterations = iters;
    out.a.head<3>() = u.head<3>();
    const Trajectory traj =
        integrate_flow(out.state, ms, 0.0, T, FlowOptions{1e-13, 1e-13, 1e-9});
    const Configuration p = traj.at(T).q * rotation_matrix(-th);
    out.a[3] = 0.5 * (p(0, 1) + p(1, 1));
    out.a[4] = 0.5 * (p(1, 0) - p(0, 0));
    out.a[5] = 0.5 * (p(3, 0) - p(2, 0));
    return out;
}

}  // namespace spbc
