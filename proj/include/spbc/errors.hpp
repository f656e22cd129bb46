#pragma once

#include <stdexcept>
#include <string>

namespace spbc {

// Base class for all solver errors; catch this to handle any failure mode.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two bodies at zero (or guard-radius) separation.
struct CollisionError : Error {
    using Error::Error;
};

// Adaptive step size underflowed, usually a near-collision.
struct StepFailure : Error {
    using Error::Error;
};

// Rotation angle at which the boundary construction degenerates.
struct DegenerateAngle : Error {
    using Error::Error;
};

// The straight-line test path passes through a collision.
struct CollisionOnSegment : Error {
    using Error::Error;
};

// Bracketing function does not change sign on the search interval.
struct NoSignChange : Error {
    using Error::Error;
};

// Evaluation time outside the domain of a path or trajectory.
struct OutOfDomain : Error {
    using Error::Error;
};

// Quadrature-node separation guard tripped during action evaluation.
struct NearCollision : Error {
    using Error::Error;
};

// Every inner restart ran into the near-collision guard.
struct CollisionPath : Error {
    using Error::Error;
};

// Outer minimization made no progress within its evaluation budget.
struct Stalled : Error {
    using Error::Error;
};

struct JacobianSingular : Error {
    using Error::Error;
};

struct NotConverged : Error {
    using Error::Error;
};

struct NotPeriodic : Error {
    using Error::Error;
};

struct NonSymplectic : Error {
    using Error::Error;
};

// Polar chart breaks down when a Jacobi vector vanishes.
struct PolarSingularity : Error {
    using Error::Error;
};

// State expected in the center-of-mass frame is not.
struct NotCentered : Error {
    using Error::Error;
};

}  // namespace spbc
