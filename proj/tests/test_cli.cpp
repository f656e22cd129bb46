#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spbc/document.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const fs::path dir = fs::temp_directory_path() / "spbc_cli_test";
    fs::create_directories(dir);
    const fs::path out_file = dir / "stdout.txt";
    const std::string cmd = std::string(SPBC_CLI_PATH) + " " + args + " > " +
                            out_file.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    res.out = ss.str();
    return res;
}

std::string strip_timestamps(const std::string& text) {
    std::stringstream in(text), out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find("generated_at") != std::string::npos) continue;
        if (line.find("stability_at") != std::string::npos) continue;
        out << line << "\n";
    }
    return out.str();
}

}  // namespace

TEST_CASE("classify subcommand") {
    const RunResult res = run_cli("classify --theta 2/5");
    CHECK(res.exit_code == 0);
    const auto j = nlohmann::json::parse(res.out);
    CHECK(j.at("kind") == "simple-choreographic-forward");
    CHECK(j.at("period_multiple") == 40);
    CHECK(j.at("sides_per_curve") == 5);

    const RunResult nc = run_cli("classify --theta 1/4");
    const auto jn = nlohmann::json::parse(nc.out);
    CHECK(jn.at("kind") == "non-choreographic");
    CHECK(jn.at("period_multiple") == 8);
    CHECK(jn.at("sides_per_curve") == 1);

    const RunResult dc = run_cli("classify --theta 3/10");
    const auto jd = nlohmann::json::parse(dc.out);
    CHECK(jd.at("kind") == "double-choreographic");
    CHECK(jd.at("period_multiple") == 40);

    CHECK(run_cli("classify --theta 0.97").exit_code == 64);
}

TEST_CASE("circular and testpath subcommands") {
    const RunResult circ = run_cli("circular --theta 2/5 --T 1");
    CHECK(circ.exit_code == 0);
    const auto jc = nlohmann::json::parse(circ.out);
    CHECK(std::abs(jc.at("action").get<double>() - 3.528734094) < 1e-6);

    const RunResult tp = run_cli("testpath --theta 2/5 --T 1");
    CHECK(tp.exit_code == 0);
    const auto jt = nlohmann::json::parse(tp.out);
    CHECK(std::abs(jt.at("action").get<double>() - 3.2484) < 5e-4);

    // The degenerate angle is refused as a usage error.
    CHECK(run_cli("circular --theta 1/2").exit_code == 64);
}

TEST_CASE("solve refuses theta = pi/2 and bad usage") {
    CHECK(run_cli("solve --theta 1/2").exit_code == 64);
    CHECK(run_cli("frobnicate").exit_code == 64);
    CHECK(run_cli("solve --no-such-flag 1").exit_code == 64);
}

TEST_CASE("quasi-periodic solve, export, determinism") {
    const fs::path dir = fs::temp_directory_path() / "spbc_cli_quasi";
    fs::create_directories(dir);
    const std::string doc1 = (dir / "q1.json").string();
    const std::string doc2 = (dir / "q2.json").string();
    const std::string flags =
        "solve --theta 1.3 --modes 16 --quad-nodes 128 --cycles 3 --samples 8 ";
    REQUIRE(run_cli(flags + "--out " + doc1).exit_code == 0);

    const spbc::OrbitDocument doc = spbc::read_document(doc1);
    CHECK_FALSE(doc.theta.is_rational());
    CHECK(doc.classification.kind == spbc::OrbitKind::QuasiPeriodic);
    CHECK(doc.classification.period_multiple == 0);

    // No period key in the serialized classification.
    std::ifstream in(doc1);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto j = nlohmann::json::parse(ss.str());
    CHECK_FALSE(j.at("classification").contains("period_multiple"));

    // Same flags, bitwise-identical output apart from timestamps.
    REQUIRE(run_cli(flags + "--out " + doc2).exit_code == 0);
    std::ifstream f2(doc2);
    std::stringstream s2;
    s2 << f2.rdbuf();
    CHECK(strip_timestamps(ss.str()) == strip_timestamps(s2.str()));

    // Stability on a quasi-periodic document is a solver error.
    CHECK(run_cli("stability --in " + doc1).exit_code == 2);

    // CSV export round trip.
    const std::string csv = (dir / "q1.csv").string();
    REQUIRE(run_cli("export --in " + doc1 + " --out " + csv).exit_code == 0);
    std::ifstream cin(csv);
    std::string header;
    std::getline(cin, header);
    CHECK(header.rfind("t,q1x", 0) == 0);
    std::size_t rows = 0;
    std::string line;
    while (std::getline(cin, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == doc.samples.size());
    fs::remove_all(dir);
}

TEST_CASE("empty sweep writes an empty summary") {
    const fs::path dir = fs::temp_directory_path() / "spbc_cli_sweep";
    fs::remove_all(dir);
    const RunResult res = run_cli("sweep --out-dir " + dir.string());
    CHECK(res.exit_code == 0);
    std::ifstream in(dir / "summary.csv");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("theta,", 0) == 0);
    std::string rest;
    std::getline(in, rest);
    CHECK(rest.empty());
    fs::remove_all(dir);
}
