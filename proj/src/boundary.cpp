#include "spbc/boundary.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "spbc/dynamics.hpp"

namespace spbc {

namespace {

constexpr double kPi = std::numbers::pi;
// Potential of four unit masses at the vertices of a square on the unit
// circle.
const double kU0 = 2.0 * std::sqrt(2.0) + 1.0;

double wrap_check_angle(double theta) {
    if (!(theta > 0.0 && theta < kPi)) {
        throw OutOfDomain("rotation angle must lie in (0, pi)");
    }
    return theta;
}

// Adaptive Simpson for f on [a, b] to absolute tolerance tol.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol, int depth,
                        double fa, double fm, double fb) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, tol / 2.0, depth - 1, fa, flm, fm) +
           adaptive_simpson(f, m, b, tol / 2.0, depth - 1, fm, frm, fb);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, tol, 48, fa, fm, fb);
}

// Integral of 1/sqrt(a + b t + c t^2) over [0, T]; the radicand is a
// pairwise squared distance and stays positive on admissible segments.
double inverse_sqrt_quadratic_integral(double a, double b, double c, double T) {
    const double scale = std::max({a, std::abs(b) * T, 1e-300});
    if (c > 1e-12 * scale / (T * T)) {
        const double sc = std::sqrt(c);
        const auto F = [&](double t) {
            const double radicand = a + t * (b + c * t);
            return std::log(2.0 * sc * std::sqrt(radicand) + 2.0 * c * t + b) /
                   sc;
        };
        const double v = F(T) - F(0.0);
        if (std::isfinite(v)) return v;
    }
    // Nearly parallel relative motion; the logarithmic form is ill
    // conditioned, integrate numerically instead.
    const auto f = [&](double t) {
        return 1.0 / std::sqrt(a + t * (b + c * t));
    };
    return adaptive_simpson(f, 0.0, T, 1e-10);
}

}  // namespace

RotationAngle RotationAngle::rational(long p, long q) {
    if (p <= 0 || q <= 0) throw OutOfDomain("P and Q must be positive");
    const long g = std::gcd(p, q);
    p /= g;
    q /= g;
    if (p >= q) throw OutOfDomain("P/Q must lie in (0, 1)");
    RotationAngle r;
    r.rational_ = true;
    r.p_ = p;
    r.q_ = q;
    r.value_ = static_cast<double>(p) * kPi / static_cast<double>(q);
    return r;
}

RotationAngle RotationAngle::real(double theta) {
    wrap_check_angle(theta);
    RotationAngle r;
    r.rational_ = false;
    r.value_ = theta;
    return r;
}

Mat2 rotation_matrix(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Mat2 R;
    R << c, -s, s, c;
    return R;
}

Configuration reflect_y(const Configuration& q) {
    Configuration out = q;
    out.col(0) = -q.col(0);
    return out;
}

Configuration build_qstart(double a1, double a2, double a3) {
    Configuration q;
    q << a1, a2, 0.0, -a3, -a1, a2, 0.0, -2.0 * a2 + a3;
    return q;
}

Configuration build_qend(double a4, double a5, double a6, double theta) {
    Configuration q;
    q << -a5, a4, a5, a4, -a6, -a4, a6, -a4;
    return q * rotation_matrix(theta);
}

CircularAction circular_action(double theta, double T) {
    wrap_check_angle(theta);
    if (!(T > 0.0)) throw OutOfDomain("T must be positive");
    if (std::abs(theta - kPi / 2.0) < 1e-12) {
        throw DegenerateAngle("circular benchmark undefined at theta = pi/2");
    }
    const bool lower = theta < kPi / 2.0;
    const double alpha = lower ? std::abs(theta - kPi / 4.0)
                               : std::abs(theta - 3.0 * kPi / 4.0);
    CircularAction out;
    if (alpha < 1e-12) {
        out.degenerate = true;
        out.radius = std::numeric_limits<double>::infinity();
        out.period = std::numeric_limits<double>::infinity();
        return out;
    }
    out.action = 3.0 * std::pow(2.0, -1.0 / 3.0) * std::pow(kU0, 2.0 / 3.0) *
                 std::cbrt(T) * std::pow(alpha, 2.0 / 3.0);
    const double a1 =
        std::cbrt(kU0) * std::pow(T, 2.0 / 3.0) * std::pow(2.0 * alpha, -2.0 / 3.0);
    out.radius = a1;
    out.period = 2.0 * kPi * T / alpha;
    const double h = std::sqrt(2.0) / 2.0 * a1;
    if (lower) {
        out.a_circ << a1, 0.0, -a1, h, -h, h;
    } else {
        out.a_circ << a1, 0.0, a1, h, h, -h;
    }
    return out;
}

double test_path_kinetic(const BoundaryParams& bp, const MassSystem& ms) {
    const Configuration qs = build_qstart(bp.a[0], bp.a[1], bp.a[2]);
    const Configuration qe =
        build_qend(bp.a[3], bp.a[4], bp.a[5], bp.theta.value());
    double kin = 0.0;
    for (int k = 0; k < 4; ++k) {
        kin += ms.m[k] * (qe.row(k) - qs.row(k)).squaredNorm() / (2.0 * bp.T);
    }
    return kin;
}

double test_path_action(const BoundaryParams& bp, const MassSystem& ms) {
    if (!(bp.T > 0.0)) throw OutOfDomain("T must be positive");
    const double T = bp.T;
    const Configuration qs = build_qstart(bp.a[0], bp.a[1], bp.a[2]);
    const Configuration qe =
        build_qend(bp.a[3], bp.a[4], bp.a[5], bp.theta.value());

    double action = test_path_kinetic(bp, ms);
    for (int k = 0; k < 4; ++k) {
        for (int j = k + 1; j < 4; ++j) {
            const Vec2 ds = (qs.row(k) - qs.row(j)).transpose();
            const Vec2 de = (qe.row(k) - qe.row(j)).transpose();
            const Vec2 slope = (de - ds) / T;
            const double a = ds.squaredNorm();
            const double b = 2.0 * ds.dot(slope);
            const double c = slope.squaredNorm();
            // Minimum of the squared distance along the segment.
            double dmin2 = std::min(a, a + b * T + c * T * T);
            if (c > 0.0) {
                const double tv = -b / (2.0 * c);
                if (tv > 0.0 && tv < T) dmin2 = std::min(dmin2, a + tv * (b + c * tv));
            }
            if (!(dmin2 > 0.0)) {
                throw CollisionOnSegment("test path passes through a collision");
            }
            action += ms.m[k] * ms.m[j] *
                      inverse_sqrt_quadratic_integral(a, b, c, T);
        }
    }
    return action;
}

ThetaBrackets theta_brackets(const Vector6& a_ref, double T) {
    const auto g = [&](double theta) {
        BoundaryParams bp;
        bp.a = a_ref;
        bp.T = T;
        bp.theta = RotationAngle::real(theta);
        return circular_action(theta, T).action - test_path_action(bp);
    };
    const auto bracket = [&](double lo, double hi) {
        constexpr int kScan = 64;
        double tl = lo, fl = g(tl);
        std::pair<double, double> found{0.0, 0.0};
        bool ok = false;
        for (int i = 1; i <= kScan; ++i) {
            const double tr = lo + (hi - lo) * static_cast<double>(i) / kScan;
            const double fr = g(tr);
            if (fl == 0.0 || fl * fr < 0.0) {
                found = {tl, tr};
                ok = true;
                break;
            }
            tl = tr;
            fl = fr;
        }
        if (!ok) throw NoSignChange("no crossing of the action levels found");
        auto [bl, br] = found;
        double fbl = g(bl);
        while (br - bl > 1e-6) {
            const double mid = 0.5 * (bl + br);
            const double fmid = g(mid);
            if (fbl * fmid <= 0.0) {
                br = mid;
            } else {
                bl = mid;
                fbl = fmid;
            }
        }
        return std::make_pair(bl, br);
    };
    const double eps = 1e-4;
    ThetaBrackets out;
    out.theta0 = bracket(kPi / 4.0 + eps, kPi / 2.0 - eps);
    out.theta1 = bracket(kPi / 2.0 + eps, 3.0 * kPi / 4.0 - eps);
    return out;
}

}  // namespace spbc
