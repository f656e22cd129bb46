#pragma once

#include <functional>
#include <random>

#include "spbc/types.hpp"

namespace spbc::testing {

// Independent quadrature oracle (composite Simpson with n panels).
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

// Central difference of a scalar function of one coordinate.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline std::mt19937_64 rng(unsigned salt = 0) {
    return std::mt19937_64(0xab5u + salt);
}

// Random configuration with all bodies in [-2,2]^2 and pairwise separation
// at least min_sep.
inline Configuration random_config(std::mt19937_64& gen, double min_sep = 0.3) {
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    for (;;) {
        Configuration q;
        for (int i = 0; i < 4; ++i) {
            q(i, 0) = box(gen);
            q(i, 1) = box(gen);
        }
        if (min_pair_distance(q) >= min_sep) return q;
    }
}

inline PhaseState random_state(std::mt19937_64& gen, double min_sep = 0.3) {
    std::uniform_real_distribution<double> vel(-1.0, 1.0);
    PhaseState s;
    s.q = random_config(gen, min_sep);
    for (int i = 0; i < 4; ++i) {
        s.v(i, 0) = vel(gen);
        s.v(i, 1) = vel(gen);
    }
    return s;
}

inline PhaseState random_centered_state(std::mt19937_64& gen,
                                        const MassSystem& ms,
                                        double min_sep = 0.3) {
    return centered(random_state(gen, min_sep), ms);
}

}  // namespace spbc::testing
