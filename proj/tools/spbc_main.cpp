#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "spbc/document.hpp"
#include "spbc/fixtures.hpp"
#include "spbc/outersolve.hpp"
#include "spbc/stability.hpp"

namespace {

constexpr int kExitSolver = 2;
constexpr int kExitUsage = 64;

using namespace spbc;

struct ThetaFlag {
    std::string text = "2/5";

    RotationAngle parse() const {
        const auto slash = text.find('/');
        if (slash != std::string::npos) {
            const long p = std::stol(text.substr(0, slash));
            const long q = std::stol(text.substr(slash + 1));
            return RotationAngle::rational(p, q);
        }
        return RotationAngle::real(std::stod(text));
    }
};

void require_solvable_angle(const RotationAngle& theta) {
    if (std::abs(theta.value() - std::numbers::pi / 2.0) < 1e-12) {
        throw DegenerateAngle("theta = pi/2 is excluded");
    }
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct SolveOptions {
    ThetaFlag theta;
    double T = 1.0;
    std::vector<double> seed;
    std::string seed_fixture = "reference";
    int modes = 32;
    int quad_nodes = 512;
    double tol = 1e-10;
    int cycles = -1;
    int samples_per_T = 64;
    std::string out = "orbit.json";
};

Vector6 resolve_seed(const SolveOptions& opt) {
    if (!opt.seed.empty()) {
        if (opt.seed.size() != 6) throw CLI::ValidationError("--seed needs 6 values");
        Vector6 a;
        for (int i = 0; i < 6; ++i) a[i] = opt.seed[i];
        return a;
    }
    const auto fx = fixtures::seed_by_name(opt.seed_fixture);
    if (!fx) throw CLI::ValidationError("unknown fixture '" + opt.seed_fixture + "'");
    return *fx;
}

OrbitDocument run_solve(const SolveOptions& opt, double* outer_value = nullptr) {
    const RotationAngle theta = opt.theta.parse();
    require_solvable_angle(theta);
    const MassSystem ms;
    const Vector6 seed = resolve_seed(opt);

    OuterOptions oo;
    oo.inner.modes = opt.modes;
    oo.inner.quad_nodes = opt.quad_nodes;
    const OuterResult outer = outer_minimize(seed, theta, opt.T, ms, oo);
    if (outer_value) *outer_value = outer.value;
    const ShootingResult shoot = shooting_refine(
        outer.a_star, theta, opt.T, ms, opt.tol, &outer.inner_path);
    const Trajectory piece = integrate_flow(shoot.state, ms, 0.0, opt.T,
                                            FlowOptions{1e-13, 1e-13, 1e-9});
    const Orbit orbit = extend_orbit(OrbitPiece::from_trajectory(piece), theta,
                                     opt.cycles, opt.samples_per_T);

    OrbitDocument doc;
    doc.theta = theta;
    doc.T = opt.T;
    doc.a_vector = shoot.a;
    doc.initial_state = shoot.state;
    doc.classification = orbit.classification;
    doc.samples = orbit.samples;
    doc.provenance = {
        {"generated_at", timestamp()},
        {"command", "solve"},
        {"seed_fixture", opt.seed.empty() ? opt.seed_fixture : "(explicit)"},
        {"modes", std::to_string(opt.modes)},
        {"quad_nodes", std::to_string(opt.quad_nodes)},
        {"shooting_tol", std::to_string(opt.tol)},
        {"outer_value", std::to_string(outer.value)},
        {"shooting_residual", std::to_string(shoot.residual)},
        {"junction_vel_res", std::to_string(orbit.junctions.vel_res)},
    };
    return doc;
}

int cmd_solve(const SolveOptions& opt) {
    const OrbitDocument doc = run_solve(opt);
    write_document(doc, opt.out);
    std::printf("wrote %s (%s", opt.out.c_str(),
                to_string(doc.classification.kind).c_str());
    if (doc.classification.period_multiple > 0) {
        std::printf(", period %ldT", doc.classification.period_multiple);
    }
    std::printf(")\n");
    return 0;
}

int cmd_stability(const std::string& in, const std::string& out, double tol,
                  long period_multiple) {
    OrbitDocument doc = read_document(in);
    if (!doc.theta.is_rational()) {
        throw NotPeriodic("quasi-periodic document has no stability analysis");
    }
    const MassSystem ms(doc.masses);
    const Classification cls = classify_angle(doc.theta);
    // The reduced orbit is already 8T-periodic (the extension only rotates
    // after four blocks), so strongly unstable orbits whose full period is
    // numerically untrackable can be analyzed at a shorter period multiple.
    if (period_multiple <= 0) period_multiple = cls.period_multiple;
    const double period = static_cast<double>(period_multiple) * doc.T;
    const ReducedState z0 = to_reduced(centered(doc.initial_state, ms), ms);
    const MonodromyReport rep =
        stability_verdict(monodromy_matrix(z0, ms, period), tol);

    OrbitDocument::StabilityBlock blk;
    blk.period = period;
    blk.w_eigenvalues = rep.W_eigenvalues;
    blk.nontrivial_pairs = rep.nontrivial_pairs;
    blk.symplectic_residual = rep.symplectic_residual;
    blk.verdict = to_string(rep.verdict);
    doc.stability = blk;
    doc.provenance.emplace_back("stability_at", timestamp());
    write_document(doc, out.empty() ? in : out);

    std::printf("period %.6g, symplectic residual %.3e\n", period,
                rep.symplectic_residual);
    std::printf("%-28s %18s %18s\n", "W eigenvalue", "real", "imag");
    for (int i = 0; i < 10; ++i) {
        const bool trivial =
            i == rep.trivial_indices[0] || i == rep.trivial_indices[1];
        std::printf("%-28s %18.12f %18.3e\n",
                    trivial ? "trivial (+1)" : "nontrivial",
                    rep.W_eigenvalues[i].real(), rep.W_eigenvalues[i].imag());
    }
    std::printf("pair values:");
    for (double p : rep.nontrivial_pairs) std::printf(" %.6f", p);
    std::printf("\nverdict: %s\n", to_string(rep.verdict).c_str());
    return 0;
}

int cmd_classify(const std::string& theta_text) {
    ThetaFlag tf{theta_text};
    const RotationAngle theta = tf.parse();
    if (!theta.is_rational()) {
        throw CLI::ValidationError("classification needs a rational theta P/Q");
    }
    const Classification c = classify_angle(theta);
    nlohmann::json j;
    j["theta"] = {{"p", theta.p()}, {"q", theta.q()}};
    j["kind"] = to_string(c.kind);
    j["curves"] = c.curves;
    j["sides_per_curve"] = c.sides_per_curve;
    j["period_multiple"] = c.period_multiple;
    if (!c.chase_order.empty()) j["chase_order"] = c.chase_order;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_circular(const std::string& theta_text, double T) {
    ThetaFlag tf{theta_text};
    const CircularAction ca = circular_action(tf.parse().value(), T);
    nlohmann::json j;
    j["action"] = ca.action;
    j["degenerate"] = ca.degenerate;
    if (!ca.degenerate) {
        j["radius"] = ca.radius;
        j["period"] = ca.period;
        j["a_circ"] = std::vector<double>(ca.a_circ.data(), ca.a_circ.data() + 6);
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_testpath(const std::string& theta_text, double T,
                 const std::vector<double>& a_flag) {
    BoundaryParams bp;
    bp.T = T;
    bp.theta = ThetaFlag{theta_text}.parse();
    if (a_flag.empty()) {
        bp.a = fixtures::reference_boundary().a;
    } else if (a_flag.size() == 6) {
        for (int i = 0; i < 6; ++i) bp.a[i] = a_flag[i];
    } else {
        throw CLI::ValidationError("--a needs 6 values");
    }
    nlohmann::json j;
    j["kinetic"] = test_path_kinetic(bp);
    j["action"] = test_path_action(bp);
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct SweepOptions {
    std::vector<std::string> thetas;
    double T = 1.0;
    bool with_stability = false;
    double stability_tol = 1e-3;
    std::string out_dir = "sweep";
    int jobs = 1;
    SolveOptions solve;  // seed, modes, nodes, tol shared per job
};

int cmd_sweep(const SweepOptions& opt) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);

    struct Row {
        std::string theta_text;
        std::string status = "ok";
        double value = 0.0, circular = 0.0;
        std::string kind, verdict;
        long period_multiple = 0;
    };
    std::vector<Row> rows(opt.thetas.size());

    std::mutex mu;
    std::size_t next = 0;
    const auto worker = [&] {
        for (;;) {
            std::size_t idx;
            {
                std::lock_guard lock(mu);
                if (next >= opt.thetas.size()) return;
                idx = next++;
            }
            Row row;
            row.theta_text = opt.thetas[idx];
            SolveOptions so = opt.solve;
            so.theta.text = opt.thetas[idx];
            std::string stem = opt.thetas[idx];
            for (char& ch : stem)
                if (ch == '/' || ch == '.') ch = '_';
            so.out = (fs::path(opt.out_dir) / ("orbit_" + stem + ".json")).string();
            try {
                OrbitDocument doc = run_solve(so, &row.value);
                const RotationAngle theta = so.theta.parse();
                try {
                    row.circular = circular_action(theta.value(), so.T).action;
                } catch (const DegenerateAngle&) {
                    row.circular = std::numeric_limits<double>::quiet_NaN();
                }
                row.kind = to_string(doc.classification.kind);
                row.period_multiple = doc.classification.period_multiple;
                if (opt.with_stability && doc.theta.is_rational()) {
                    const MassSystem ms(doc.masses);
                    const double period =
                        static_cast<double>(doc.classification.period_multiple) *
                        doc.T;
                    const ReducedState z0 =
                        to_reduced(centered(doc.initial_state, ms), ms);
                    const MonodromyReport rep = stability_verdict(
                        monodromy_matrix(z0, ms, period), opt.stability_tol);
                    row.verdict = to_string(rep.verdict);
                    OrbitDocument::StabilityBlock blk;
                    blk.period = period;
                    blk.w_eigenvalues = rep.W_eigenvalues;
                    blk.nontrivial_pairs = rep.nontrivial_pairs;
                    blk.symplectic_residual = rep.symplectic_residual;
                    blk.verdict = row.verdict;
                    doc.stability = blk;
                }
                write_document(doc, so.out);
            } catch (const std::exception& e) {
                row.status = std::string("failed: ") + e.what();
            }
            {
                std::lock_guard lock(mu);
                rows[idx] = std::move(row);
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::max(1, std::min<int>(opt.jobs, opt.thetas.size()));
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    const auto summary = fs::path(opt.out_dir) / "summary.csv";
    std::ofstream out(summary);
    out << "theta,action,circular_action,kind,period_multiple,verdict,status\n";
    for (const Row& r : rows) {
        out << r.theta_text << ',' << r.value << ',' << r.circular << ','
            << r.kind << ',' << r.period_multiple << ',' << r.verdict << ','
            << '"' << r.status << '"' << "\n";
    }
    std::printf("wrote %s\n", summary.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planar four-body periodic-orbit toolkit"};
    app.require_subcommand(1);

    SolveOptions solve_opt;
    auto* solve = app.add_subcommand(
        "solve", "Find an orbit: outer/inner minimization plus shooting polish");
    solve->add_option("--theta", solve_opt.theta.text,
                      "rotation angle, P/Q (exact) or decimal");
    solve->add_option("--T", solve_opt.T, "piece duration");
    solve->add_option("--seed", solve_opt.seed, "boundary seed a1..a6");
    solve->add_option("--seed-fixture", solve_opt.seed_fixture,
                      "named seed: reference, star-pentagon, theta-P-Q");
    solve->add_option("--modes", solve_opt.modes, "sine modes per coordinate");
    solve->add_option("--quad-nodes", solve_opt.quad_nodes, "quadrature nodes");
    solve->add_option("--tol", solve_opt.tol, "shooting residual tolerance");
    solve->add_option("--cycles", solve_opt.cycles,
                      "2T blocks to assemble (-1 = minimal period)");
    solve->add_option("--samples", solve_opt.samples_per_T, "samples per T");
    solve->add_option("--out", solve_opt.out, "output document");

    std::string stab_in, stab_out;
    double stab_tol = 1e-3;
    long stab_period = 0;
    auto* stability = app.add_subcommand(
        "stability", "Monodromy eigenvalues and the stability verdict");
    stability->add_option("--in", stab_in, "orbit document")->required();
    stability->add_option("--out", stab_out, "output (default: rewrite input)");
    stability->add_option("--tol", stab_tol, "verdict tolerance");
    stability->add_option("--period-multiple", stab_period,
                          "period as a multiple of T (default: minimal "
                          "period; 8 is always a reduced period)");

    std::string classify_theta;
    auto* classify = app.add_subcommand("classify", "Classify by rotation angle");
    classify->add_option("--theta", classify_theta, "rational angle P/Q")
        ->required();

    std::string circ_theta = "2/5";
    double circ_T = 1.0;
    auto* circular = app.add_subcommand(
        "circular", "Closed-form action of the circular benchmark");
    circular->add_option("--theta", circ_theta, "angle");
    circular->add_option("--T", circ_T, "piece duration");

    std::string tp_theta = "2/5";
    double tp_T = 1.0;
    std::vector<double> tp_a;
    auto* testpath = app.add_subcommand(
        "testpath", "Action of the straight constant-velocity test path");
    testpath->add_option("--theta", tp_theta, "angle");
    testpath->add_option("--T", tp_T, "piece duration");
    testpath->add_option("--a", tp_a, "boundary vector a1..a6");

    SweepOptions sweep_opt;
    auto* sweep = app.add_subcommand("sweep", "Solve a list of angles");
    sweep->add_option("--thetas", sweep_opt.thetas, "angles, e.g. 2/5 3/7");
    sweep->add_option("--T", sweep_opt.T, "piece duration");
    sweep->add_flag("--stability", sweep_opt.with_stability,
                    "append stability analysis per angle");
    sweep->add_option("--stability-tol", sweep_opt.stability_tol,
                      "verdict tolerance");
    sweep->add_option("--out-dir", sweep_opt.out_dir, "output directory");
    sweep->add_option("--jobs", sweep_opt.jobs, "worker pool size");
    sweep->add_option("--seed", sweep_opt.solve.seed, "boundary seed a1..a6");
    sweep->add_option("--seed-fixture", sweep_opt.solve.seed_fixture,
                      "named seed fixture");
    sweep->add_option("--modes", sweep_opt.solve.modes, "sine modes");
    sweep->add_option("--quad-nodes", sweep_opt.solve.quad_nodes,
                      "quadrature nodes");
    sweep->add_option("--tol", sweep_opt.solve.tol, "shooting tolerance");

    std::string exp_in, exp_out = "orbit.csv";
    auto* exporter = app.add_subcommand("export", "Export samples as CSV");
    exporter->add_option("--in", exp_in, "orbit document")->required();
    exporter->add_option("--out", exp_out, "CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_opt);
        if (stability->parsed())
            return cmd_stability(stab_in, stab_out, stab_tol, stab_period);
        if (classify->parsed()) return cmd_classify(classify_theta);
        if (circular->parsed()) return cmd_circular(circ_theta, circ_T);
        if (testpath->parsed()) return cmd_testpath(tp_theta, tp_T, tp_a);
        if (sweep->parsed()) {
            sweep_opt.solve.T = sweep_opt.T;
            return cmd_sweep(sweep_opt);
        }
        if (exporter->parsed()) {
            export_csv(read_document(exp_in), exp_out);
            std::printf("wrote %s\n", exp_out.c_str());
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const DegenerateAngle& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return kExitUsage;
    } catch (const OutOfDomain& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        nlohmann::json diag;
        diag["error"] = e.what();
        std::cerr << diag.dump() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        nlohmann::json diag;
        diag["error"] = e.what();
        std::cerr << diag.dump() << "\n";
        return kExitSolver;
    }
    return kExitUsage;
}
