#include "spbc/document.hpp"

#include <fstream>

namespace spbc {

namespace {

using nlohmann::json;

json state_to_json(const PhaseState& s) {
    json q = json::array(), v = json::array();
    for (int i = 0; i < 4; ++i) {
        q.push_back({s.q(i, 0), s.q(i, 1)});
        v.push_back({s.v(i, 0), s.v(i, 1)});
    }
    return json{{"q", q}, {"v", v}};
}

PhaseState state_from_json(const json& j) {
    PhaseState s;
    for (int i = 0; i < 4; ++i) {
        s.q(i, 0) = j.at("q").at(i).at(0).get<double>();
        s.q(i, 1) = j.at("q").at(i).at(1).get<double>();
        s.v(i, 0) = j.at("v").at(i).at(0).get<double>();
        s.v(i, 1) = j.at("v").at(i).at(1).get<double>();
    }
    return s;
}

json classification_to_json(const Classification& c) {
    json j;
    j["kind"] = to_string(c.kind);
    j["curves"] = c.curves;
    if (c.sides_per_curve > 0) j["sides_per_curve"] = c.sides_per_curve;
    if (c.period_multiple > 0) j["period_multiple"] = c.period_multiple;
    if (!c.chase_order.empty()) j["chase_order"] = c.chase_order;
    return j;
}

Classification classification_from_json(const json& j) {
    Classification c;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "non-choreographic") c.kind = OrbitKind::NonChoreographic;
    else if (kind == "simple-choreographic-forward") c.kind = OrbitKind::ChoreographicForward;
    else if (kind == "double-choreographic") c.kind = OrbitKind::DoubleChoreographic;
    else if (kind == "simple-choreographic-reverse") c.kind = OrbitKind::ChoreographicReverse;
    else c.kind = OrbitKind::QuasiPeriodic;
    c.curves = j.at("curves").get<int>();
    c.sides_per_curve = j.value("sides_per_curve", 0);
    c.period_multiple = j.value("period_multiple", 0L);
    c.chase_order = j.value("chase_order", std::string{});
    return c;
}

}  // namespace

json to_json(const OrbitDocument& doc) {
    json j;
    j["schema_version"] = doc.schema_version;
    j["masses"] = doc.masses;
    if (doc.theta.is_rational()) {
        j["theta"] = {{"p", doc.theta.p()}, {"q", doc.theta.q()}};
    } else {
        j["theta"] = {{"real", doc.theta.value()}};
    }
    j["T"] = doc.T;
    j["a_vector"] = std::vector<double>(doc.a_vector.data(), doc.a_vector.data() + 6);
    j["initial_state"] = state_to_json(doc.initial_state);
    j["classification"] = classification_to_json(doc.classification);
    json samples = json::array();
    for (const auto& [t, s] : doc.samples) {
        json e = state_to_json(s);
        e["t"] = t;
        samples.push_back(std::move(e));
    }
    j["samples"] = std::move(samples);
    if (doc.stability) {
        json s;
        s["period"] = doc.stability->period;
        json eig = json::array();
        for (const auto& w : doc.stability->w_eigenvalues) {
            eig.push_back({w.real(), w.imag()});
        }
        s["w_eigenvalues"] = std::move(eig);
        s["nontrivial_pairs"] = doc.stability->nontrivial_pairs;
        s["symplectic_residual"] = doc.stability->symplectic_residual;
        s["verdict"] = doc.stability->verdict;
        j["stability"] = std::move(s);
    }
    json prov = json::object();
    for (const auto& [k, v] : doc.provenance) prov[k] = v;
    j["provenance"] = std::move(prov);
    return j;
}

OrbitDocument document_from_json(const json& j) {
    OrbitDocument doc;
    doc.schema_version = j.at("schema_version").get<int>();
    doc.masses = j.at("masses").get<std::array<double, 4>>();
    const json& th = j.at("theta");
    if (th.contains("p")) {
        doc.theta = RotationAngle::rational(th.at("p").get<long>(),
                                            th.at("q").get<long>());
    } else {
        doc.theta = RotationAngle::real(th.at("real").get<double>());
    }
    doc.T = j.at("T").get<double>();
    const auto av = j.at("a_vector").get<std::vector<double>>();
    for (int i = 0; i < 6; ++i) doc.a_vector[i] = av.at(i);
    doc.initial_state = state_from_json(j.at("initial_state"));
    doc.classification = classification_from_json(j.at("classification"));
    for (const auto& e : j.at("samples")) {
        doc.samples.emplace_back(e.at("t").get<double>(), state_from_json(e));
    }
    if (j.contains("stability")) {
        OrbitDocument::StabilityBlock s;
        const json& js = j.at("stability");
        s.period = js.at("period").get<double>();
        for (int i = 0; i < 10; ++i) {
            s.w_eigenvalues[i] = {js.at("w_eigenvalues").at(i).at(0).get<double>(),
                                  js.at("w_eigenvalues").at(i).at(1).get<double>()};
        }
        s.nontrivial_pairs = js.at("nontrivial_pairs").get<std::array<double, 4>>();
        s.symplectic_residual = js.at("symplectic_residual").get<double>();
        s.verdict = js.at("verdict").get<std::string>();
        doc.stability = std::move(s);
    }
    if (j.contains("provenance")) {
        for (const auto& [k, v] : j.at("provenance").items()) {
            doc.provenance.emplace_back(k, v.get<std::string>());
        }
    }
    return doc;
}

void write_document(const OrbitDocument& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << to_json(doc).dump(2) << "\n";
}

OrbitDocument read_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    json j;
    in >> j;
    return document_from_json(j);
}

void export_csv(const OrbitDocument& doc, const std::string& path) {
    if (doc.samples.empty()) throw Error("document has no samples to export");
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "t,q1x,q1y,q2x,q2y,q3x,q3y,q4x,q4y,"
           "v1x,v1y,v2x,v2y,v3x,v3y,v4x,v4y\n";
    char buf[32];
    const auto emit = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out << buf;
    };
    for (const auto& [t, s] : doc.samples) {
        emit(t);
        for (int i = 0; i < 4; ++i) {
            out << ',';
            emit(s.q(i, 0));
            out << ',';
            emit(s.q(i, 1));
        }
        for (int i = 0; i < 4; ++i) {
            out << ',';
            emit(s.v(i, 0));
            out << ',';
            emit(s.v(i, 1));
        }
        out << '\n';
    }
}

}  // namespace spbc
