#include "spbc/ode.hpp"

#include <algorithm>
#include <cmath>

namespace spbc {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                 c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// Error coefficients (5th order solution minus embedded 4th order).
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense-output coefficients.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0,
                  const Eigen::VectorXd& y1, double atol, double rtol) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc =
            atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = err[i] / sc;
        s += r * r;
    }
    return std::sqrt(s / static_cast<double>(err.size()));
}

double initial_step_guess(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0,
                          const Eigen::VectorXd& f0, double dir, double atol,
                          double rtol, double hmax) {
    double d0 = 0.0, d1n = 0.0;
    for (Eigen::Index i = 0; i < y0.size(); ++i) {
        const double sc = atol + rtol * std::abs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        d1n += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / static_cast<double>(y0.size()));
    d1n = std::sqrt(d1n / static_cast<double>(y0.size()));
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, hmax);

    Eigen::VectorXd y1 = y0 + dir * h0 * f0;
    Eigen::VectorXd f1(y0.size());
    rhs(t0 + dir * h0, y1, f1);
    double d2 = 0.0;
    for (Eigen::Index i = 0; i < y0.size(); ++i) {
        const double sc = atol + rtol * std::abs(y0[i]);
        const double r = (f1[i] - f0[i]) / sc;
        d2 += r * r;
    }
    d2 = std::sqrt(d2 / static_cast<double>(y0.size())) / h0;

    double h1;
    if (std::max(d1n, d2) <= 1e-15) {
        h1 = std::max(1e-6, h0 * 1e-3);
    } else {
        h1 = std::pow(0.01 / std::max(d1n, d2), 0.2);
    }
    return std::min({100.0 * h0, h1, hmax});
}

}  // namespace

Eigen::VectorXd OdeSolution::eval(double t) const {
    const double lo = std::min(t_begin_, t_end_);
    const double hi = std::max(t_begin_, t_end_);
    const double span = hi - lo;
    if (t < lo - 1e-12 * (1.0 + span) || t > hi + 1e-12 * (1.0 + span)) {
        throw OutOfDomain("time outside integrated span");
    }
    t = std::clamp(t, lo, hi);

    // Binary search for the step containing t (steps are time-ordered in the
    // direction of integration).
    const bool forward = t_end_ >= t_begin_;
    std::size_t a = 0, b = steps_.size() - 1;
    while (a < b) {
        const std::size_t mid = (a + b) / 2;
        const OdeStep& s = steps_[mid];
        const double end = s.t0 + s.h;
        if ((forward && t <= end) || (!forward && t >= end))
            b = mid;
        else
            a = mid + 1;
    }
    const OdeStep& s = steps_[a];
    const double theta = (t - s.t0) / s.h;
    const double theta1 = 1.0 - theta;
    return s.rcont[0] +
           theta * (s.rcont[1] +
                    theta1 * (s.rcont[2] +
                              theta * (s.rcont[3] + theta1 * s.rcont[4])));
}

OdeSolution integrate_ode(const OdeRhs& rhs, double t0, double t1,
                          const Eigen::VectorXd& y0, const OdeOptions& opts) {
    if (!(opts.abs_tol > 0.0) || !(opts.rel_tol > 0.0) ||
        opts.abs_tol > 1e-2 || opts.rel_tol > 1e-2) {
        throw Error("tolerances must lie in (0, 1e-2]");
    }
    OdeSolution sol;
    sol.t_begin_ = t0;
    sol.t_end_ = t1;
    sol.y_end_ = y0;
    if (t1 == t0) {
        OdeStep st;
        st.t0 = t0;
        st.h = 0.0;
        st.rcont.fill(y0);
        st.rcont[1].setZero();
        st.rcont[2].setZero();
        st.rcont[3].setZero();
        st.rcont[4].setZero();
        sol.steps_.push_back(std::move(st));
        return sol;
    }

    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double hmax = opts.max_step > 0.0 ? opts.max_step : span;

    const Eigen::Index n = y0.size();
    Eigen::VectorXd y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n),
                    ytmp(n), ynew(n), err(n);
    rhs(t0, y, k1);

    double h = opts.initial_step > 0.0
                   ? std::min(opts.initial_step, hmax)
                   : initial_step_guess(rhs, t0, y, k1, dir, opts.abs_tol,
                                        opts.rel_tol, hmax);
    double t = t0;
    double facold = 1e-4;
    constexpr double beta = 0.04;
    constexpr double expo1 = 0.2 - beta * 0.75;
    constexpr double safety = 0.9;
    constexpr double facmin = 0.2, facmax = 10.0;

    for (long step = 0; step < opts.max_steps; ++step) {
        if (dir * (t + dir * h - t1) > 0.0) h = std::abs(t1 - t);
        const double hs = dir * h;
        if (h < 1e-14 * (1.0 + std::abs(t))) {
            throw StepFailure("step size underflow at t = " + std::to_string(t));
        }

        ytmp = y + hs * (a21 * k1);
        rhs(t + c2 * hs, ytmp, k2);
        ytmp = y + hs * (a31 * k1 + a32 * k2);
        rhs(t + c3 * hs, ytmp, k3);
        ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * hs, ytmp, k4);
        ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * hs, ytmp, k5);
        ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + hs, ytmp, k6);
        ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        rhs(t + hs, ynew, k7);

        err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double en = error_norm(err, y, ynew, opts.abs_tol, opts.rel_tol);
        const double fac11 = std::pow(std::max(en, 1e-30), expo1);

        if (en <= 1.0) {
            OdeStep st;
            st.t0 = t;
            st.h = hs;
            const Eigen::VectorXd ydiff = ynew - y;
            const Eigen::VectorXd bspl = hs * k1 - ydiff;
            st.rcont[0] = y;
            st.rcont[1] = ydiff;
            st.rcont[2] = bspl;
            st.rcont[3] = ydiff - hs * k7 - bspl;
            st.rcont[4] = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 +
                                d6 * k6 + d7 * k7);
            sol.steps_.push_back(std::move(st));

            t += hs;
            y.swap(ynew);
            k1.swap(k7);  // FSAL

            const double fac =
                std::clamp(fac11 / (std::pow(facold, beta) * safety), 1.0 / facmax,
                           1.0 / facmin);
            facold = std::max(en, 1e-4);
            h = std::min(h / fac, hmax);
            if (dir * (t - t1) >= 0.0) {
                sol.y_end_ = y;
                return sol;
            }
        } else {
            h /= std::min(1.0 / facmin, fac11 / safety);
        }
    }
    throw StepFailure("maximum number of steps exceeded");
}

}  // namespace spbc
