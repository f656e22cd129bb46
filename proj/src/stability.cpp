#include "spbc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace spbc {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

// Standard 10x10 symplectic matrix for z = (positions(5), momenta(5)).
Matrix10 symplectic_J() {
    Matrix10 J = Matrix10::Zero();
    for (int i = 0; i < 5; ++i) {
        J(i, 5 + i) = 1.0;
        J(5 + i, i) = -1.0;
    }
    return J;
}

// Positions in the center-of-mass frame from the Jacobi vectors.
// q1 = -m2/mu2 u2 - m3/mu3 u3 - m4/mu4 u4, etc.
struct JacobiWeights {
    // w(i, j): coefficient of u_{j+2} in q_{i+1}.
    Eigen::Matrix<double, 4, 3> w;
    explicit JacobiWeights(const MassSystem& ms) {
        const double mu2 = ms.mu(2), mu3 = ms.mu(3), mu4 = ms.mu(4);
        w << -ms.m[1] / mu2, -ms.m[2] / mu3, -ms.m[3] / mu4,
             ms.mu(1) / mu2, -ms.m[2] / mu3, -ms.m[3] / mu4,
             0.0,            mu2 / mu3,      -ms.m[3] / mu4,
             0.0,            0.0,            mu3 / mu4;
    }
};

struct ReducedGeometry {
    Configuration q;                 // positions, theta2 = 0 gauge
    std::array<Vec2, 3> u;           // u2, u3, u4
    std::array<Vec2, 3> du_dangle;   // d u_i / d (its polar angle)
    std::array<Vec2, 3> du_dradius;  // d u_i / d r_i
};

ReducedGeometry reduced_geometry(const Vector10& z, const MassSystem& ms,
                                 double theta2) {
    const double r2 = z[0], r3 = z[1], r4 = z[2], x3 = z[3], x4 = z[4];
    if (!(r2 > 0.0) || !(r3 > 0.0) || !(r4 > 0.0)) {
        throw PolarSingularity("reduced radii must be positive");
    }
    const double t3 = theta2 + x3, t4 = theta2 + x3 + x4;
    ReducedGeometry g;
    const double c2 = std::cos(theta2), s2 = std::sin(theta2);
    const double c3 = std::cos(t3), s3 = std::sin(t3);
    const double c4 = std::cos(t4), s4 = std::sin(t4);
    g.u = {Vec2(r2 * c2, r2 * s2), Vec2(r3 * c3, r3 * s3),
           Vec2(r4 * c4, r4 * s4)};
    g.du_dradius = {Vec2(c2, s2), Vec2(c3, s3), Vec2(c4, s4)};
    g.du_dangle = {Vec2(-r2 * s2, r2 * c2), Vec2(-r3 * s3, r3 * c3),
                   Vec2(-r4 * s4, r4 * c4)};
    const JacobiWeights jw(ms);
    for (int i = 0; i < 4; ++i) {
        Vec2 qi = Vec2::Zero();
        for (int j = 0; j < 3; ++j) qi += jw.w(i, j) * g.u[j];
        g.q.row(i) = qi.transpose();
    }
    return g;
}

}  // namespace

JacobiState to_jacobi(const PhaseState& s, const MassSystem& ms) {
    const double mu2 = ms.mu(2), mu3 = ms.mu(3), mu4 = ms.mu(4);
    std::array<Vec2, 4> q, p;
    for (int i = 0; i < 4; ++i) {
        q[i] = s.q.row(i).transpose();
        p[i] = ms.m[i] * s.v.row(i).transpose();
    }
    JacobiState js;
    js.g = (ms.m[0] * q[0] + ms.m[1] * q[1] + ms.m[2] * q[2] + ms.m[3] * q[3]) /
           mu4;
    js.G = p[0] + p[1] + p[2] + p[3];
    js.u[0] = q[1] - q[0];
    js.v[0] = (ms.mu(1) * p[1] - ms.m[1] * p[0]) / mu2;
    js.u[1] = q[2] - (ms.m[0] * q[0] + ms.m[1] * q[1]) / mu2;
    js.v[1] = (mu2 * p[2] - ms.m[2] * (p[0] + p[1])) / mu3;
    js.u[2] = q[3] - (ms.m[0] * q[0] + ms.m[1] * q[1] + ms.m[2] * q[2]) / mu3;
    js.v[2] = (mu3 * p[3] - ms.m[3] * (p[0] + p[1] + p[2])) / mu4;
    return js;
}

PhaseState from_jacobi(const JacobiState& js, const MassSystem& ms) {
    const double mu2 = ms.mu(2), mu3 = ms.mu(3), mu4 = ms.mu(4);
    const JacobiWeights jw(ms);
    PhaseState s;
    for (int i = 0; i < 4; ++i) {
        Vec2 qi = js.g;
        for (int j = 0; j < 3; ++j) qi += jw.w(i, j) * js.u[j];
        s.q.row(i) = qi.transpose();
    }
    const Vec2 p1 = (ms.m[0] / mu4) * js.G - js.v[0] - (ms.m[0] / mu2) * js.v[1] -
                    (ms.m[0] / mu3) * js.v[2];
    const Vec2 p2 = (ms.m[1] / mu4) * js.G + js.v[0] - (ms.m[1] / mu2) * js.v[1] -
                    (ms.m[1] / mu3) * js.v[2];
    const Vec2 p3 = (ms.m[2] / mu4) * js.G + js.v[1] - (ms.m[2] / mu3) * js.v[2];
    const Vec2 p4 = (ms.m[3] / mu4) * js.G + js.v[2];
    s.v.row(0) = (p1 / ms.m[0]).transpose();
    s.v.row(1) = (p2 / ms.m[1]).transpose();
    s.v.row(2) = (p3 / ms.m[2]).transpose();
    s.v.row(3) = (p4 / ms.m[3]).transpose();
    return s;
}

ReducedState to_reduced(const PhaseState& s, const MassSystem& ms) {
    if (!is_centered(s, ms, 1e-9)) {
        throw NotCentered("reduction requires a centered state");
    }
    const JacobiState js = to_jacobi(s, ms);
    double r[3], theta[3], R[3], Th[3];
    for (int i = 0; i < 3; ++i) {
        r[i] = js.u[i].norm();
        if (r[i] < 1e-10) {
            throw PolarSingularity("Jacobi vector too small for polar chart");
        }
        theta[i] = std::atan2(js.u[i][1], js.u[i][0]);
        R[i] = js.u[i].dot(js.v[i]) / r[i];
        Th[i] = js.u[i][0] * js.v[i][1] - js.u[i][1] * js.v[i][0];
    }
    ReducedState rs;
    rs.z << r[0], r[1], r[2], wrap_angle(theta[1] - theta[0]),
        wrap_angle(theta[2] - theta[1]), R[0], R[1], R[2], Th[1] + Th[2], Th[2];
    rs.c = Th[0] + Th[1] + Th[2];
    rs.x2 = theta[0];
    return rs;
}

PhaseState from_reduced(const ReducedState& rs, const MassSystem& ms) {
    const double theta2 = rs.x2;
    const double theta3 = theta2 + rs.z[3];
    const double theta4 = theta3 + rs.z[4];
    const double X3 = rs.z[8], X4 = rs.z[9];
    const double Th2 = rs.c - X3, Th3 = X3 - X4, Th4 = X4;
    const double th[3] = {theta2, theta3, theta4};
    const double Th[3] = {Th2, Th3, Th4};
    JacobiState js;
    for (int i = 0; i < 3; ++i) {
        const double r = rs.z[i], R = rs.z[5 + i];
        const double ct = std::cos(th[i]), st = std::sin(th[i]);
        js.u[i] = Vec2(r * ct, r * st);
        js.v[i] = Vec2(R * ct - Th[i] / r * st, R * st + Th[i] / r * ct);
    }
    return from_jacobi(js, ms);
}

double h4_value(const Vector10& z, double c, const MassSystem& ms) {
    const double r2 = z[0], r3 = z[1], r4 = z[2];
    const double R2 = z[5], R3 = z[6], R4 = z[7], X3 = z[8], X4 = z[9];
    const double M2 = ms.reduced(2), M3 = ms.reduced(3), M4 = ms.reduced(4);
    const double kin =
        (R2 * R2 * r2 * r2 + (c - X3) * (c - X3)) / (2.0 * M2 * r2 * r2) +
        (R3 * R3 * r3 * r3 + (X3 - X4) * (X3 - X4)) / (2.0 * M3 * r3 * r3) +
        (R4 * R4 * r4 * r4 + X4 * X4) / (2.0 * M4 * r4 * r4);
    const ReducedGeometry g = reduced_geometry(z, ms, 0.0);
    return kin - potential(g.q, ms);
}

Vector10 h4_gradient(const Vector10& z, double c, const MassSystem& ms) {
    const double r2 = z[0], r3 = z[1], r4 = z[2];
    const double R2 = z[5], R3 = z[6], R4 = z[7], X3 = z[8], X4 = z[9];
    const double M2 = ms.reduced(2), M3 = ms.reduced(3), M4 = ms.reduced(4);

    Vector10 grad = Vector10::Zero();
    // Kinetic part.
    grad[0] = -(c - X3) * (c - X3) / (M2 * r2 * r2 * r2);
    grad[1] = -(X3 - X4) * (X3 - X4) / (M3 * r3 * r3 * r3);
    grad[2] = -X4 * X4 / (M4 * r4 * r4 * r4);
    grad[5] = R2 / M2;
    grad[6] = R3 / M3;
    grad[7] = R4 / M4;
    grad[8] = -(c - X3) / (M2 * r2 * r2) + (X3 - X4) / (M3 * r3 * r3);
    grad[9] = -(X3 - X4) / (M3 * r3 * r3) + X4 / (M4 * r4 * r4);

    // -U4 through the geometry reconstruction. dU/dq_i is m_i times the
    // acceleration of body i.
    const ReducedGeometry g = reduced_geometry(z, ms, 0.0);
    const Configuration acc = accelerations(g.q, ms);
    const JacobiWeights jw(ms);
    std::array<Vec2, 3> W{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 4; ++i) {
            W[j] += jw.w(i, j) * ms.m[i] * acc.row(i).transpose();
        }
    }
    const double dU_dr2 = W[0].dot(g.du_dradius[0]);
    const double dU_dr3 = W[1].dot(g.du_dradius[1]);
    const double dU_dr4 = W[2].dot(g.du_dradius[2]);
    const double dU_dx3 =
        W[1].dot(g.du_dangle[1]) + W[2].dot(g.du_dangle[2]);
    const double dU_dx4 = W[2].dot(g.du_dangle[2]);
    grad[0] -= dU_dr2;
    grad[1] -= dU_dr3;
    grad[2] -= dU_dr4;
    grad[3] -= dU_dx3;
    grad[4] -= dU_dx4;
    return grad;
}

Matrix10 h4_hessian(const Vector10& z, double c, const MassSystem& ms) {
    Matrix10 H;
    for (int i = 0; i < 10; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(z[i]));
        Vector10 zp = z, zm = z;
        zp[i] += h;
        zm[i] -= h;
        H.col(i) = (h4_gradient(zp, c, ms) - h4_gradient(zm, c, ms)) / (2.0 * h);
    }
    // The exact Hessian is symmetric; symmetrize away the difference noise.
    return 0.5 * (H + H.transpose());
}

namespace {

Vector10 reduced_rhs(const Vector10& z, double c, const MassSystem& ms) {
    const Vector10 g = h4_gradient(z, c, ms);
    Vector10 zdot;
    zdot.head<5>() = g.tail<5>();
    zdot.tail<5>() = -g.head<5>();
    return zdot;
}

double reduced_closure_distance(const Vector10& a, const Vector10& b) {
    double d = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double diff =
            (i == 3 || i == 4) ? wrap_angle(a[i] - b[i]) : a[i] - b[i];
        d = std::max(d, std::abs(diff));
    }
    return d;
}

}  // namespace

ReducedTrajectory integrate_reduced(const ReducedState& z0, const MassSystem& ms,
                                    double t0, double t1, double abs_tol,
                                    double rel_tol) {
    const double c = z0.c;
    OdeRhs rhs = [c, &ms](double, const Eigen::VectorXd& y,
                          Eigen::VectorXd& dy) {
        const Vector10 z = y;
        dy = reduced_rhs(z, c, ms);
    };
    OdeOptions opts;
    opts.abs_tol = abs_tol;
    opts.rel_tol = rel_tol;
    return ReducedTrajectory(integrate_ode(rhs, t0, t1, z0.z, opts), c);
}

MonodromyReport monodromy_matrix(const ReducedState& z0, const MassSystem& ms,
                                 double period, double abs_tol, double rel_tol) {
    // The orbit must actually close in the reduced variables.
    const ReducedTrajectory probe =
        integrate_reduced(z0, ms, 0.0, period, abs_tol, rel_tol);
    const double closure = reduced_closure_distance(probe.at(period), z0.z);
    if (closure > 1e-6) {
        throw NotPeriodic("reduced orbit closure " + std::to_string(closure) +
                          " exceeds 1e-6");
    }

    // Validate every column of the finite-difference Hessian against direct
    // second differences of the Hamiltonian at the starting point.
    {
        const Matrix10 H = h4_hessian(z0.z, z0.c, ms);
        const double f0 = h4_value(z0.z, z0.c, ms);
        const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
        const auto step = [&](int i) { return 1e-4 * (1.0 + std::abs(z0.z[i])); };
        for (int i = 0; i < 10; ++i) {
            for (int j = i; j < 10; ++j) {
                double d2;
                if (i == j) {
                    Vector10 zp = z0.z, zm = z0.z;
                    zp[i] += step(i);
                    zm[i] -= step(i);
                    d2 = (h4_value(zp, z0.c, ms) - 2.0 * f0 +
                          h4_value(zm, z0.c, ms)) /
                         (step(i) * step(i));
                } else {
                    Vector10 zpp = z0.z, zpm = z0.z, zmp = z0.z, zmm = z0.z;
                    zpp[i] += step(i); zpp[j] += step(j);
                    zpm[i] += step(i); zpm[j] -= step(j);
                    zmp[i] -= step(i); zmp[j] += step(j);
                    zmm[i] -= step(i); zmm[j] -= step(j);
                    d2 = (h4_value(zpp, z0.c, ms) - h4_value(zpm, z0.c, ms) -
                          h4_value(zmp, z0.c, ms) + h4_value(zmm, z0.c, ms)) /
                         (4.0 * step(i) * step(j));
                }
                if (std::abs(d2 - H(i, j)) > 1e-5 * std::max(scale, std::abs(d2))) {
                    throw Error("Hessian validation failed at (" +
                                std::to_string(i) + ", " + std::to_string(j) +
                                ")");
                }
            }
        }
    }

    const double c = z0.c;
    OdeRhs rhs = [c, &ms](double, const Eigen::VectorXd& y,
                          Eigen::VectorXd& dy) {
        const Vector10 z = y.head<10>();
        const Matrix10 X =
            Eigen::Map<const Matrix10>(y.data() + 10);
        const Vector10 g = h4_gradient(z, c, ms);
        const Matrix10 H = h4_hessian(z, c, ms);
        Matrix10 JH;
        JH.topRows<5>() = H.bottomRows<5>();
        JH.bottomRows<5>() = -H.topRows<5>();
        const Matrix10 Xdot = JH * X;
        dy.resize(110);
        dy.head<5>() = g.tail<5>();
        dy.segment<5>(5) = -g.head<5>();
        Eigen::Map<Matrix10>(dy.data() + 10) = Xdot;
    };

    Eigen::VectorXd y0(110);
    y0.head<10>() = z0.z;
    Eigen::Map<Matrix10>(y0.data() + 10) = Matrix10::Identity();
    OdeOptions opts;
    opts.abs_tol = abs_tol;
    opts.rel_tol = rel_tol;
    const OdeSolution sol = integrate_ode(rhs, 0.0, period, y0, opts);

    MonodromyReport rep;
    rep.X = Eigen::Map<const Matrix10>(sol.final_state().data() + 10);
    rep.closure = closure;
    const Matrix10 J = symplectic_J();
    rep.symplectic_residual =
        (rep.X.transpose() * J * rep.X - J).cwiseAbs().maxCoeff();
    rep.zdot0 = reduced_rhs(z0.z, c, ms);
    return rep;
}

MonodromyReport stability_verdict(const MonodromyReport& partial, double tol) {
    MonodromyReport rep = partial;
    const Matrix10 J = symplectic_J();
    rep.symplectic_residual =
        (rep.X.transpose() * J * rep.X - J).cwiseAbs().maxCoeff();
    if (rep.symplectic_residual >= 1e-4) {
        throw NonSymplectic("monodromy symplectic residual " +
                            std::to_string(rep.symplectic_residual));
    }

    const Matrix10 W = 0.5 * (rep.X + rep.X.inverse());
    Eigen::EigenSolver<Matrix10> es(W);
    if (es.info() != Eigen::Success) throw Error("eigen decomposition failed");
    for (int i = 0; i < 10; ++i) rep.W_eigenvalues[i] = es.eigenvalues()[i];

    // Trivial pair: closest to +1, requiring eigenvector content in
    // span{zdot0, J zdot0} when the tangent is available.
    std::array<double, 10> score{};
    const bool have_tangent = rep.zdot0.norm() > 0.0;
    if (have_tangent) {
        Eigen::Matrix<double, 10, 2> basis;
        basis.col(0) = rep.zdot0.normalized();
        Vector10 jz = J * rep.zdot0;
        jz -= basis.col(0).dot(jz) * basis.col(0);
        basis.col(1) = jz.normalized();
        for (int i = 0; i < 10; ++i) {
            const Eigen::Matrix<std::complex<double>, 10, 1> v =
                es.eigenvectors().col(i);
            std::complex<double> p0 = 0.0, p1 = 0.0;
            for (int k = 0; k < 10; ++k) {
                p0 += std::conj(v[k]) * basis(k, 0);
                p1 += std::conj(v[k]) * basis(k, 1);
            }
            score[i] = std::sqrt(std::norm(p0) + std::norm(p1)) / v.norm();
        }
    }
    std::array<int, 10> order;
    for (int i = 0; i < 10; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(rep.W_eigenvalues[a] - 1.0) <
               std::abs(rep.W_eigenvalues[b] - 1.0);
    });
    int found = 0;
    for (int idx : order) {
        if (have_tangent && score[idx] < 0.05) continue;
        rep.trivial_indices[found++] = idx;
        if (found == 2) break;
    }
    for (int idx : order) {
        if (found == 2) break;
        if (idx != rep.trivial_indices[0] && idx != rep.trivial_indices[1]) {
            rep.trivial_indices[found++] = idx;
        }
    }

    std::vector<std::complex<double>> rest;
    rest.reserve(8);
    for (int i = 0; i < 10; ++i) {
        if (i != rep.trivial_indices[0] && i != rep.trivial_indices[1]) {
            rest.push_back(rep.W_eigenvalues[i]);
        }
    }

    bool any_complex = false, any_outside = false;
    for (const auto& w : rest) {
        if (std::abs(w.imag()) > tol) any_complex = true;
        if (std::abs(w.real()) > 1.0 + tol) any_outside = true;
    }
    std::sort(rest.begin(), rest.end(),
              [](const auto& a, const auto& b) { return a.real() < b.real(); });
    rep.pairing_gap = 0.0;
    bool inside = true;
    for (int p = 0; p < 4; ++p) {
        const auto& wa = rest[2 * p];
        const auto& wb = rest[2 * p + 1];
        rep.pairing_gap = std::max(rep.pairing_gap, std::abs(wa - wb));
        rep.nontrivial_pairs[p] = 0.5 * (wa.real() + wb.real());
        if (!(std::abs(rep.nontrivial_pairs[p]) < 1.0 - tol)) inside = false;
    }
    if (any_complex || any_outside) {
        rep.verdict = Verdict::Unstable;
        return rep;
    }
    bool distinct = true;
    for (int p = 0; p < 4; ++p) {
        for (int r = p + 1; r < 4; ++r) {
            if (std::abs(rep.nontrivial_pairs[p] - rep.nontrivial_pairs[r]) <=
                tol) {
                distinct = false;
            }
        }
    }
    if (inside && distinct) {
        rep.verdict = Verdict::LinearlyStable;
    } else if (inside) {
        rep.verdict = Verdict::SpectrallyStable;
    } else {
        rep.verdict = Verdict::Indeterminate;
    }
    return rep;
}

MonodromyReport stability_verdict(const Matrix10& X, double tol) {
    MonodromyReport partial;
    partial.X = X;
    partial.zdot0.setZero();
    return stability_verdict(partial, tol);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::LinearlyStable: return "linearly-stable";
        case Verdict::SpectrallyStable: return "spectrally-stable";
        case Verdict::Unstable: return "unstable";
        case Verdict::Indeterminate: return "indeterminate";
    }
    return "unknown";
}

}  // namespace spbc
