#pragma once

#include <array>
#include <optional>
#include <vector>

#include "spbc/boundary.hpp"
#include "spbc/types.hpp"

// Read-only numeric fixtures: the star-pentagon solution data, the reference
// boundary vector with its benchmark actions, and the stability catalog the
// regression suite runs against.
namespace spbc::fixtures {

struct StarPentagon {
    long p = 2, q = 5;
    double T = 1.0;
    long period_multiple = 40;
    Vector6 a0;               // converged boundary vector
    PhaseState state0;        // initial conditions of the assembled orbit
    std::array<double, 4> w_pairs;  // nontrivial W-eigenvalue pair values
};

const StarPentagon& star_pentagon();

struct ReferenceBoundary {
    Vector6 a;                     // seed vector for theta = 2 pi / 5, T = 1
    double test_path_action;       // straight-path action at that vector
    double circular_action;        // circular benchmark at the same angle
};

const ReferenceBoundary& reference_boundary();

struct AngleBrackets {
    std::pair<double, double> theta0;  // (1.1938, 1.2252)
    std::pair<double, double> theta1;  // (1.7279, 1.7593)
};

const AngleBrackets& angle_brackets();

struct CatalogEntry {
    long p = 0, q = 0;
    long period_multiple = 0;
    bool stable = false;
    // Published pair values; empty when only the verdict is known.
    std::vector<double> w_pairs;
    // Listed initial conditions, when available.
    std::optional<PhaseState> state0;
};

// Entries with tabulated eigenvalue pairs (all linearly stable).
const std::vector<CatalogEntry>& stability_catalog();

// Angles whose periodic solutions are linearly unstable.
const std::vector<std::pair<long, long>>& unstable_angles();

// Looks up a fixture seed by name: "reference", "star-pentagon",
// "theta-3-7", "theta-5-12", "theta-9-22". Returns the boundary vector
// (a1..a3 exact; a4..a6 copied from the reference solve when the fixture
// only records initial conditions).
std::optional<Vector6> seed_by_name(const std::string& name);

}  // namespace spbc::fixtures
