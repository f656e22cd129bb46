#include "spbc/fixtures.hpp"

#include <string>

namespace spbc::fixtures {

namespace {

PhaseState make_state(std::initializer_list<double> qv,
                      std::initializer_list<double> vv) {
    PhaseState s;
    auto qi = qv.begin();
    auto vi = vv.begin();
    for (int i = 0; i < 4; ++i) {
        s.q(i, 0) = *qi++;
        s.q(i, 1) = *qi++;
        s.v(i, 0) = *vi++;
        s.v(i, 1) = *vi++;
    }
    return s;
}

}  // namespace

const StarPentagon& star_pentagon() {
    static const StarPentagon fx = [] {
        StarPentagon f;
        f.a0 << 1.0598738926379, 1.7699901770118, 0.80951135793043,
            0.75377929101531, 1.1034410399611, 2.440248251576;
        f.state0 = make_state(
            {1.0598738926379, 1.7699901770118,
             0.0, -0.80951135793043,
             -1.0598738926379, 1.7699901770118,
             0.0, -2.7304689960932},
            {-0.55391384867197, -0.39895079845794,
             1.0936551555351, 0.0,
             -0.55391558212647, 0.39895379682134,
             0.01417427526245, 0.0});
        f.w_pairs = {0.761537, 0.235841, -0.299445, -0.456736};
        return f;
    }();
    return fx;
}

const ReferenceBoundary& reference_boundary() {
    static const ReferenceBoundary fx = [] {
        ReferenceBoundary f;
        f.a << 1.0597, 1.7696, 0.8094, 0.7536, 1.1032, 2.4398;
        f.test_path_action = 3.2484;
        f.circular_action = 3.528734094;
        return f;
    }();
    return fx;
}

const AngleBrackets& angle_brackets() {
    static const AngleBrackets fx{{1.1938, 1.2252}, {1.7279, 1.7593}};
    return fx;
}

const std::vector<CatalogEntry>& stability_catalog() {
    static const std::vector<CatalogEntry> fx = [] {
        std::vector<CatalogEntry> v;
        {
            CatalogEntry e;
            e.p = 3;
            e.q = 7;
            e.period_multiple = 56;
            e.stable = true;
            e.w_pairs = {-0.375476, 0.493924, 0.623185, 0.698755};
            e.state0 = make_state(
                {0.9421459089, 2.189431278,
                 0.0, -1.300514651,
                 -0.9421459089, 2.189431278,
                 0.0, -3.078347905},
                {-0.4908870906, -0.474846006,
                 1.039544889, 0.0,
                 -0.4908437595, 0.4748326024,
                 -0.05781403894, 0.0});
            v.push_back(e);
        }
        {
            CatalogEntry e;
            e.p = 4;
            e.q = 9;
            e.period_multiple = 72;
            e.stable = true;
            e.w_pairs = {-0.888315, 0.717492, 0.781167, 0.875241};
            v.push_back(e);
        }
        {
            CatalogEntry e;
            e.p = 15;
            e.q = 31;
            e.period_multiple = 248;
            e.stable = true;
            e.w_pairs = {-0.761943, -0.0535079, -0.375899, 0.994815};
            v.push_back(e);
        }
        {
            CatalogEntry e;
            e.p = 5;
            e.q = 12;
            e.period_multiple = 24;
            e.stable = true;
            e.w_pairs = {-0.752385, 0.786314, 0.850377, 0.845072};
            e.state0 = make_state(
                {0.9885667998, 1.984831768,
                 0.0, -1.067317853,
                 -0.9885667998, 1.984831768,
                 0.0, -2.902345684},
                {-0.5187341985, -0.4460463326,
                 1.064058961, 0.0,
                 -0.5187107584, 0.4460354291,
                 -0.02661400412, 0.0});
            v.push_back(e);
        }
        {
            CatalogEntry e;
            e.p = 9;
            e.q = 22;
            e.period_multiple = 88;
            e.stable = true;
            e.w_pairs = {-0.612649, -0.791503, -0.967491, -0.99911};
            e.state0 = make_state(
                {1.020078100, 1.878808307,
                 0.0, -0.9422097516,
                 -1.02007810, 1.878808307,
                 0.0, -2.815406862},
                {-0.5352327448, -0.4256795762,
                 1.078223783, 0.0,
                 -0.5352124256, 0.4256692972,
                 -0.007778613051, 0.0});
            v.push_back(e);
        }
        return v;
    }();
    return fx;
}

const std::vector<std::pair<long, long>>& unstable_angles() {
    static const std::vector<std::pair<long, long>> fx = {
        {1, 4}, {1, 3}, {3, 8}, {3, 10}};
    return fx;
}

std::optional<Vector6> seed_by_name(const std::string& name) {
    if (name == "reference") return reference_boundary().a;
    if (name == "star-pentagon") return star_pentagon().a0;
    const auto from_state = [](const CatalogEntry& e) {
        // a1..a3 read off the start template; a4..a6 start from the
        // reference trapezoid and let the outer solve adjust them.
        Vector6 a = reference_boundary().a;
        const PhaseState& s = *e.state0;
        a[0] = s.q(0, 0);
        a[1] = s.q(0, 1);
        a[2] = -s.q(1, 1);
        return a;
    };
    for (const auto& e : stability_catalog()) {
        if (!e.state0) continue;
        const std::string key =
            "theta-" + std::to_string(e.p) + "-" + std::to_string(e.q);
        if (name == key) return from_state(e);
    }
    return std::nullopt;
}

}  // namespace spbc::fixtures
