#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spbc/assembly.hpp"
#include "spbc/stability.hpp"
#include "spbc/types.hpp"

namespace spbc {

// Serialized solution document (schema_version 1). All numeric fields round
// trip at full binary64 precision through the JSON layer.
struct OrbitDocument {
    int schema_version = 1;
    std::array<double, 4> masses{1.0, 1.0, 1.0, 1.0};
    RotationAngle theta = RotationAngle::real(1.0);
    double T = 1.0;
    Vector6 a_vector = Vector6::Zero();
    PhaseState initial_state;
    Classification classification;
    std::vector<std::pair<double, PhaseState>> samples;

    struct StabilityBlock {
        double period = 0.0;
        std::array<std::complex<double>, 10> w_eigenvalues{};
        std::array<double, 4> nontrivial_pairs{};
        double symplectic_residual = 0.0;
        std::string verdict;
    };
    std::optional<StabilityBlock> stability;

    // Free-form provenance: solver options, tolerances, timestamps.
    std::vector<std::pair<std::string, std::string>> provenance;
};

nlohmann::json to_json(const OrbitDocument& doc);
OrbitDocument document_from_json(const nlohmann::json& j);

void write_document(const OrbitDocument& doc, const std::string& path);
OrbitDocument read_document(const std::string& path);

// Plot-ready CSV with header
//   t,q1x,q1y,...,q4x,q4y,v1x,v1y,...,v4y
// and one row per stored sample, full precision.
void export_csv(const OrbitDocument& doc, const std::string& path);

}  // namespace spbc
