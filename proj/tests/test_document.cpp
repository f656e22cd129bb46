#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spbc/document.hpp"
#include "spbc/fixtures.hpp"
#include "test_helpers.hpp"

using namespace spbc;
namespace fs = std::filesystem;

namespace {

OrbitDocument sample_document() {
    auto gen = spbc::testing::rng(50);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    OrbitDocument doc;
    doc.theta = RotationAngle::rational(2, 5);
    doc.T = 1.0;
    for (int i = 0; i < 6; ++i) doc.a_vector[i] = u(gen);
    doc.initial_state = spbc::testing::random_state(gen);
    doc.classification = classify_angle(doc.theta);
    for (int n = 0; n < 40; ++n) {
        doc.samples.emplace_back(0.025 * n, spbc::testing::random_state(gen));
    }
    OrbitDocument::StabilityBlock blk;
    blk.period = 40.0;
    for (int i = 0; i < 10; ++i) blk.w_eigenvalues[i] = {u(gen), u(gen) * 1e-9};
    blk.nontrivial_pairs = {u(gen), u(gen), u(gen), u(gen)};
    blk.symplectic_residual = 3.7e-9;
    blk.verdict = "linearly-stable";
    doc.stability = blk;
    doc.provenance = {{"generated_at", "2026-01-01T00:00:00Z"},
                      {"command", "test"}};
    return doc;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / "spbc_doc_test";
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("JSON round trip is lossless at full binary64 precision") {
    TempDir tmp;
    const OrbitDocument doc = sample_document();
    const std::string path = (tmp.path / "doc.json").string();
    write_document(doc, path);
    const OrbitDocument back = read_document(path);

    CHECK(back.schema_version == doc.schema_version);
    CHECK(back.theta.is_rational());
    CHECK(back.theta.p() == 2);
    CHECK(back.theta.q() == 5);
    CHECK(back.T == doc.T);
    for (int i = 0; i < 6; ++i) CHECK(back.a_vector[i] == doc.a_vector[i]);
    CHECK((back.initial_state.q - doc.initial_state.q).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((back.initial_state.v - doc.initial_state.v).cwiseAbs().maxCoeff() ==
          0.0);
    REQUIRE(back.samples.size() == doc.samples.size());
    for (std::size_t n = 0; n < doc.samples.size(); ++n) {
        CHECK(back.samples[n].first == doc.samples[n].first);
        CHECK((back.samples[n].second.q - doc.samples[n].second.q)
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
        CHECK((back.samples[n].second.v - doc.samples[n].second.v)
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }
    REQUIRE(back.stability.has_value());
    for (int i = 0; i < 10; ++i) {
        CHECK(back.stability->w_eigenvalues[i] ==
              doc.stability->w_eigenvalues[i]);
    }
    CHECK(back.stability->symplectic_residual ==
          doc.stability->symplectic_residual);
    CHECK(back.stability->verdict == doc.stability->verdict);

    // A second write of the re-read document is byte identical.
    const std::string path2 = (tmp.path / "doc2.json").string();
    write_document(back, path2);
    std::ifstream f1(path), f2(path2);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
}

TEST_CASE("irrational theta round trips") {
    TempDir tmp;
    OrbitDocument doc = sample_document();
    doc.theta = RotationAngle::real(0.97);
    doc.classification = classify_angle(doc.theta);
    doc.stability.reset();
    const std::string path = (tmp.path / "quasi.json").string();
    write_document(doc, path);
    const OrbitDocument back = read_document(path);
    CHECK_FALSE(back.theta.is_rational());
    CHECK(back.theta.value() == 0.97);
    CHECK_FALSE(back.stability.has_value());
    CHECK(back.classification.kind == OrbitKind::QuasiPeriodic);
    CHECK(back.classification.period_multiple == 0);
}

TEST_CASE("CSV export") {
    TempDir tmp;
    const OrbitDocument doc = sample_document();
    const std::string path = (tmp.path / "orbit.csv").string();
    export_csv(doc, path);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "t,q1x,q1y,q2x,q2y,q3x,q3y,q4x,q4y,"
          "v1x,v1y,v2x,v2y,v3x,v3y,v4x,v4y");
    std::size_t rows = 0;
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            ++rows;
            lines.push_back(line);
        }
    }
    CHECK(rows == doc.samples.size());

    // Read back the first row at full precision.
    std::stringstream ss(lines.front());
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    REQUIRE(vals.size() == 17);
    CHECK(vals[0] == doc.samples.front().first);
    CHECK(vals[1] == doc.samples.front().second.q(0, 0));
    CHECK(vals[16] == doc.samples.front().second.v(3, 1));

    OrbitDocument empty = doc;
    empty.samples.clear();
    CHECK_THROWS_AS(export_csv(empty, (tmp.path / "x.csv").string()), Error);
}

TEST_CASE("fixture seeds resolve by name") {
    CHECK(fixtures::seed_by_name("reference").has_value());
    CHECK(fixtures::seed_by_name("star-pentagon").has_value());
    CHECK(fixtures::seed_by_name("theta-3-7").has_value());
    CHECK(fixtures::seed_by_name("theta-5-12").has_value());
    CHECK(fixtures::seed_by_name("theta-9-22").has_value());
    CHECK_FALSE(fixtures::seed_by_name("nonsense").has_value());
    const Vector6 sp = *fixtures::seed_by_name("star-pentagon");
    CHECK((sp - fixtures::star_pentagon().a0).cwiseAbs().maxCoeff() == 0.0);
}
