#pragma once

#include <Eigen/Dense>

#include "spbc/errors.hpp"

namespace spbc {

// Quadrature nodes and weights on an interval [a, b]; weights are positive
// and sum to b - a.
struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;

    static QuadratureRule gauss_legendre(int n, double a, double b);
};

}  // namespace spbc
