#pragma once

#include <Eigen/Dense>

#include <array>

#include "spbc/errors.hpp"

namespace spbc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Vector10 = Eigen::Matrix<double, 10, 1>;
using Matrix10 = Eigen::Matrix<double, 10, 10>;

// Planar configuration of the four bodies; row i is the position of body i.
using Configuration = Eigen::Matrix<double, 4, 2>;

// Masses with the partial sums and reduced masses used by the Jacobi
// transform. Gravitational constant is fixed at 1.
struct MassSystem {
    std::array<double, 4> m{1.0, 1.0, 1.0, 1.0};

    MassSystem() = default;
    explicit MassSystem(const std::array<double, 4>& masses) : m(masses) {
        for (double mi : m) {
            if (!(mi > 0.0)) throw Error("masses must be strictly positive");
        }
    }

    static MassSystem equal_unit() { return MassSystem(); }

    double total() const { return m[0] + m[1] + m[2] + m[3]; }

    // mu(i) = m_1 + ... + m_i, 1-based.
    double mu(int i) const {
        double s = 0.0;
        for (int k = 0; k < i; ++k) s += m[k];
        return s;
    }

    // Reduced mass M_i = m_i * mu_{i-1} / mu_i for i = 2, 3, 4.
    double reduced(int i) const { return m[i - 1] * mu(i - 1) / mu(i); }
};

// Positions and velocities of the four bodies. Momenta are m_i * v_i.
struct PhaseState {
    Configuration q = Configuration::Zero();
    Configuration v = Configuration::Zero();
};

inline Vec2 center_of_mass(const Configuration& q, const MassSystem& ms) {
    Vec2 c = Vec2::Zero();
    for (int i = 0; i < 4; ++i) c += ms.m[i] * q.row(i).transpose();
    return c / ms.total();
}

inline Vec2 total_momentum(const PhaseState& s, const MassSystem& ms) {
    Vec2 p = Vec2::Zero();
    for (int i = 0; i < 4; ++i) p += ms.m[i] * s.v.row(i).transpose();
    return p;
}

// Shift to the frame with center of mass and total momentum at zero.
inline PhaseState centered(const PhaseState& s, const MassSystem& ms) {
    PhaseState out = s;
    const Vec2 c = center_of_mass(s.q, ms);
    const Vec2 w = total_momentum(s, ms) / ms.total();
    for (int i = 0; i < 4; ++i) {
        out.q.row(i) -= c.transpose();
        out.v.row(i) -= w.transpose();
    }
    return out;
}

inline bool is_centered(const PhaseState& s, const MassSystem& ms,
                        double tol = 1e-12) {
    const double scale = 1.0 + s.q.cwiseAbs().maxCoeff() + s.v.cwiseAbs().maxCoeff();
    return center_of_mass(s.q, ms).norm() < tol * scale &&
           total_momentum(s, ms).norm() < tol * scale;
}

inline double min_pair_distance(const Configuration& q) {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            d = std::min(d, (q.row(i) - q.row(j)).norm());
    return d;
}

}  // namespace spbc
