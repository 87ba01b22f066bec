#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "bubblemesh/delaunay.hpp"
#include "bubblemesh/packing.hpp"
#include "bubblemesh/pipeline.hpp"
#include "bubblemesh/relaxation.hpp"
#include "test_support.hpp"

using namespace bubblemesh;

namespace {

Bubble make_bubble(Vec2 c, double r, BubbleKind kind = BubbleKind::Mobile) {
    Bubble b;
    b.center = c;
    b.radius = r;
    b.kind = kind;
    return b;
}

// Cubic through F(0) = f0 l0, F(1) = 0, F(cf) = 0 and F'(1) = -k l0, solved
// as a 4x4 system.
Eigen::Vector4d cubic_oracle(double l0, const ForceParams& p) {
    Eigen::Matrix4d A;
    Eigen::Vector4d rhs;
    const double cf = p.cutoff_factor;
    A << 1, 0, 0, 0,  //
        1, 1, 1, 1,   //
        1, cf, cf * cf, cf * cf * cf,  //
        0, 1, 2, 3;
    rhs << p.f0 * l0, 0, 0, -p.k * l0;
    return A.fullPivLu().solve(rhs);
}

// Hexagon of side n on the unit triangular lattice: boundary bubbles on its
// edges, mobile bubbles at the interior lattice points.
std::pair<PackingDomain, std::vector<Bubble>> hex_patch(int n) {
    Polygon hexagon;
    for (int k = 0; k < 6; ++k) {
        const double t = kPi / 3.0 * k;
        hexagon.push_back({n * std::cos(t), n * std::sin(t)});
    }
    PackingDomain d = make_domain(hexagon);
    d.r_min = d.r_max = 0.5;
    std::vector<Bubble> bubbles = pack_boundary(d);
    const Vec2 e1{1, 0}, e2{0.5, std::sqrt(3.0) / 2.0};
    for (int i = -n; i <= n; ++i) {
        for (int j = -n; j <= n; ++j) {
            const int hexdist = std::max({std::abs(i), std::abs(j), std::abs(i + j)});
            if (hexdist < n) bubbles.push_back(make_bubble(e1 * i + e2 * j, 0.5));
        }
    }
    return {d, bubbles};
}

PipelineConfig small_uniform_plate() {
    PipelineConfig c;
    c.width = 10;
    c.height = 5;
    c.holes = {{{5, 2.5}, 1.0}};
    c.sizing.r_min = c.sizing.r_max = 0.25;
    return finalize_config(c);
}

}  // namespace

TEST_CASE("force law shape") {
    ForceParams p;
    const Bubble a = make_bubble({0, 0}, 0.4), b = make_bubble({0.9, 0}, 0.5);
    SUBCASE("zero at tangency") {
        CHECK(norm(pair_force(a, b, p)) < 1e-12);
        CHECK(force_magnitude(1.0, 0.9, p) == 0.0);
    }
    SUBCASE("zero at and beyond the cutoff") {
        for (double w : {1.5, 1.5000001, 2.0, 10.0}) {
            CHECK(force_magnitude(w, 1.0, p) == 0.0);
            const Bubble c = make_bubble({w * 0.9, 0}, 0.5);
            CHECK(pair_force(a, c, p) == Vec2{});
        }
        CHECK(std::abs(force_magnitude(1.5 - 1e-12, 1.0, p)) < 1e-10);
    }
    SUBCASE("repulsion pushes i away from j") {
        const Bubble i = make_bubble({0.3, 0.2}, 0.5), j = make_bubble({0.3 + 0.5 * 0.6, 0.2 + 0.5 * 0.8}, 0.5);
        const Vec2 f = pair_force(i, j, p);
        CHECK(norm(f) > 0.0);
        const Vec2 away = i.center - j.center;
        CHECK(std::abs(cross(f, away)) < 1e-12);
        CHECK(dot(f, away) > 0.0);
    }
    SUBCASE("attraction between 1 and the cutoff") {
        const Bubble i = make_bubble({0, 0}, 0.5), j = make_bubble({1.2, 0}, 0.5);
        CHECK(pair_force(i, j, p).x > 0.0);  // pulled toward j
    }
    SUBCASE("cubic matches the four defining conditions") {
        for (double l0 : {0.2, 1.0, 3.0}) {
            for (auto [k, f0] : {std::pair{1.0, 1.0}, {2.0, 0.5}, {0.5, 0.1}}) {
                ForceParams q;
                q.k = k;
                q.f0 = f0;
                const Eigen::Vector4d c = cubic_oracle(l0, q);
                for (double w = 0.0; w < 1.5; w += 0.05) {
                    const double ref = c[0] + c[1] * w + c[2] * w * w + c[3] * w * w * w;
                    CHECK(force_magnitude(w, l0, q) == doctest::Approx(ref).epsilon(1e-10).scale(l0));
                }
                const double h = 1e-6;
                const double slope = (force_magnitude(1 + h, l0, q) - force_magnitude(1 - h, l0, q)) / (2 * h);
                CHECK(slope == doctest::Approx(-k * l0).epsilon(1e-6));
                CHECK(force_magnitude(0.0, l0, q) == doctest::Approx(f0 * l0).epsilon(1e-14));
            }
        }
    }
    SUBCASE("continuous on [0, cutoff]") {
        double prev = force_magnitude(0.0, 1.0, p);
        for (int s = 1; s <= 15000; ++s) {
            const double w = 1.5 * s / 15000.0;
            const double f = force_magnitude(w, 1.0, p);
            CHECK(std::abs(f - prev) < 1e-3);
            prev = f;
        }
        CHECK(prev == 0.0);
    }
}

TEST_CASE("Newton's third law holds exactly") {
    ForceParams p;
    p.seed = 42;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1), r(0.1, 0.6);
    for (int t = 0; t < 2000; ++t) {
        const Bubble a = make_bubble({u(rng), u(rng)}, r(rng)), b = make_bubble({u(rng), u(rng)}, r(rng));
        const Vec2 fab = pair_force(a, b, p, 3, 8), fba = pair_force(b, a, p, 8, 3);
        CHECK(fab.x + fba.x == 0.0);
        CHECK(fab.y + fba.y == 0.0);
    }
    // Coincident centres: opposite pushes of magnitude F(0), direction fixed
    // by the indices and the seed.
    const Bubble a = make_bubble({1, 1}, 0.5), b = make_bubble({1, 1}, 0.5);
    const Vec2 f12 = pair_force(a, b, p, 1, 2), f21 = pair_force(b, a, p, 2, 1);
    CHECK(f12.x + f21.x == 0.0);
    CHECK(f12.y + f21.y == 0.0);
    CHECK(norm(f12) == doctest::Approx(force_magnitude(0.0, 1.0, p)).epsilon(1e-14));
    CHECK(pair_force(a, b, p, 1, 2) == f12);
    ForceParams other = p;
    other.seed = 43;
    CHECK_FALSE(pair_force(a, b, other, 1, 2) == f12);
}

TEST_CASE("parameter validation") {
    ForceParams f;
    f.k = 0;
    CHECK_THROWS_AS(f.validate(), Error);
    DynamicsParams d;
    d.dt = 0;
    CHECK_THROWS_AS(d.validate(), Error);
    d = DynamicsParams::for_stiffness(4.0, 1.0);
    CHECK(d.c == doctest::Approx(2.8));
    CHECK(d.dt == doctest::Approx(0.1));
}

TEST_CASE("single-bubble sweeps") {
    const ForceParams force;
    SUBCASE("at rest with no force") {
        std::vector<BubbleState> s = make_states(std::vector<Bubble>{make_bubble({0.25, -1.5}, 0.3)});
        const NeighborIndex idx(s);
        relax_step(s, DynamicsParams{}, force, idx);
        CHECK(s[0].bubble.center == Vec2{0.25, -1.5});
        CHECK(s[0].velocity == Vec2{});
    }
    SUBCASE("two tangent bubbles stay put") {
        std::vector<BubbleState> s =
            make_states(std::vector<Bubble>{make_bubble({0, 0}, 0.5), make_bubble({1, 0}, 0.5)});
        const NeighborIndex idx(s);
        relax_step(s, DynamicsParams{}, force, idx);
        CHECK(s[0].bubble.center == Vec2{0, 0});
        CHECK(s[1].bubble.center == Vec2{1, 0});
    }
    SUBCASE("RK4 step against the damped linear response") {
        // m x'' + c x' = f with x(0) = 0, v(0) = v0:
        // x(t) = f t / c + (v0 - f / c) (m / c) (1 - exp(-c t / m)).
        const Vec2 f{0.7, -0.3}, v0{0.2, 0.1};
        DynamicsParams dyn;
        dyn.m = 1.0;
        dyn.c = 1.4;
        auto closed = [&](double t, double fi, double vi) {
            const double m = dyn.m, c = dyn.c;
            return fi * t / c + (vi - fi / c) * (m / c) * (1.0 - std::exp(-c * t / m));
        };
        for (double dt : {0.01, 0.005}) {
            dyn.dt = dt;
            std::vector<BubbleState> s = make_states(std::vector<Bubble>{make_bubble({0, 0}, 0.5)});
            s[0].velocity = v0;
            const NeighborIndex idx(s);
            relax_step(s, dyn, force, idx, nullptr, [&](std::size_t, const Vec2&) { return f; });
            const double xr = closed(dt, f.x, v0.x), yr = closed(dt, f.y, v0.y);
            CHECK(std::abs(s[0].bubble.center.x - xr) <= 1e-8 * std::abs(xr));
            CHECK(std::abs(s[0].bubble.center.y - yr) <= 1e-8 * std::abs(yr));
        }
        // At the default step RK4 reproduces the fourth-order Taylor
        // polynomial of the exact flow.
        dyn.dt = 0.2;
        std::vector<BubbleState> s = make_states(std::vector<Bubble>{make_bubble({0, 0}, 0.5)});
        s[0].velocity = v0;
        const NeighborIndex idx(s);
        relax_step(s, dyn, force, idx, nullptr, [&](std::size_t, const Vec2&) { return f; });
        const double h = dyn.dt, a = dyn.c / dyn.m;
        auto taylor = [&](double fi, double vi) {
            // x(h) = sum_k x^(k)(0) h^k / k!, with x' = v, v' = f/m - a v.
            const double d1 = vi, d2 = fi / dyn.m - a * vi, d3 = -a * d2, d4 = -a * d3;
            return d1 * h + d2 * h * h / 2 + d3 * h * h * h / 6 + d4 * h * h * h * h / 24;
        };
        CHECK(s[0].bubble.center.x == doctest::Approx(taylor(f.x, v0.x)).epsilon(1e-13));
        CHECK(s[0].bubble.center.y == doctest::Approx(taylor(f.y, v0.y)).epsilon(1e-13));
    }
    SUBCASE("divergence is reported") {
        std::vector<BubbleState> s = make_states(std::vector<Bubble>{make_bubble({0, 0}, 0.5)});
        const NeighborIndex idx(s);
        auto nan_force = [](std::size_t, const Vec2&) { return Vec2{std::nan(""), 0}; };
        CHECK_THROWS_WITH_AS(relax_step(s, DynamicsParams{}, force, idx, nullptr, nan_force),
                             doctest::Contains("dynamics diverged"), Error);
    }
    SUBCASE("escaping bubbles are placed back inside") {
        const PackingDomain d = make_domain(rectangle_polygon({0, 0}, {4, 4}));
        const DomainIndex di(d);
        std::vector<BubbleState> s = make_states(std::vector<Bubble>{make_bubble({3.8, 2}, 0.3)});
        s[0].velocity = {50, 0};
        const NeighborIndex idx(s);
        const SweepStats st = relax_step(s, DynamicsParams{}, force, idx, &di);
        CHECK(st.projected == 1);
        CHECK(di.contains(s[0].bubble.center));
        CHECK(s[0].bubble.center.x == doctest::Approx(4.0 - 0.3).epsilon(1e-12));
    }
}

TEST_CASE("fixed bubbles never move and anchors keep their radii") {
    PipelineConfig c = small_uniform_plate();
    PackingDomain d;
    std::vector<Bubble> bubbles = initial_plane_bubbles(c, &d);
    bubbles[bubbles.size() / 2].kind = BubbleKind::InteriorAnchor;
    std::vector<BubbleState> s = make_states(bubbles);
    const DomainIndex di(d);
    NeighborIndex idx;
    for (int sweep = 0; sweep < 40; ++sweep) {
        idx.rebuild(s);
        relax_step(s, c.dyn, c.force, idx, &di);
    }
    bool anchor_moved = false;
    for (std::size_t i = 0; i < bubbles.size(); ++i) {
        CHECK(s[i].bubble.radius == bubbles[i].radius);
        if (bubbles[i].is_fixed()) {
            CHECK(s[i].bubble.center == bubbles[i].center);
            CHECK(s[i].velocity == Vec2{});
        }
        if (bubbles[i].kind == BubbleKind::InteriorAnchor) anchor_moved = !(s[i].bubble.center == bubbles[i].center);
    }
    CHECK(anchor_moved);
}

namespace {

// Max net force per sweep without quantity control at dt = 0.1 sqrt(m/k).
std::vector<double> force_series(double damping_factor) {
    PipelineConfig c = small_uniform_plate();
    PackingDomain d;
    std::vector<Bubble> bubbles = initial_plane_bubbles(c, &d);
    DynamicsParams dyn = DynamicsParams::for_stiffness(c.force.k);
    dyn.c = damping_factor * std::sqrt(dyn.m * c.force.k);
    dyn.dt = 0.1 * std::sqrt(dyn.m / c.force.k);
    std::vector<BubbleState> s = make_states(bubbles);
    const DomainIndex di(d);
    NeighborIndex idx;
    std::vector<double> fmax;
    for (int sweep = 0; sweep < 150; ++sweep) {
        idx.rebuild(s);
        fmax.push_back(relax_step(s, dyn, c.force, idx, &di).max_force);
    }
    return fmax;
}

// Sweeps after the first 10 whose force exceeds the running minimum by more than 5%.
int dissipation_violations(const std::vector<double>& fmax) {
    double floor_f = fmax[10];
    int violations = 0;
    for (std::size_t k = 11; k < fmax.size(); ++k) {
        if (fmax[k] > 1.05 * floor_f) ++violations;
        floor_f = std::min(floor_f, fmax[k]);
    }
    return violations;
}

}  // namespace

// Monitored: at the default damping the collective modes are underdamped and
// the max force rises transiently by more than 5%.
TEST_CASE("max net force decays without quantity control (default damping)" * doctest::may_fail()) {
    const auto fmax = force_series(1.4);
    const int violations = dissipation_violations(fmax);
    MESSAGE("sweeps over the 5% band: " << violations << " of " << fmax.size() - 11);
    CHECK(violations == 0);
    CHECK(fmax.back() < fmax[10]);
}

TEST_CASE("max net force decays without quantity control (heavier damping)") {
    const auto fmax = force_series(2.5);
    CHECK(dissipation_violations(fmax) == 0);
    CHECK(fmax.back() < fmax[10]);
}

TEST_CASE("summed overlap of the alternating quantity control") {
    auto ring = [](int n, double r, BubbleKind kind) {
        std::vector<Bubble> b{make_bubble({0, 0}, r)};
        for (int k = 0; k < n; ++k) {
            const double t = 2 * kPi * k / n;
            b.push_back(make_bubble(Vec2{std::cos(t), std::sin(t)} * (2 * r), r, kind));
        }
        return b;
    };
    for (int n : {4, 6, 9}) {
        const auto b = ring(n, 0.5, BubbleKind::Boundary);
        const NeighborIndex idx{std::span<const Bubble>(b)};
        CHECK(overlap_original(0, b, idx) == doctest::Approx(n).epsilon(1e-12));
    }
    SUBCASE("4 neighbours: insertion in the widest gap") {
        auto b = ring(4, 0.5, BubbleKind::Boundary);
        b.erase(b.begin() + 4);  // gap around -90 degrees is now the widest
        const auto r = qc_original(b, 5.0, 8.0, {});
        CHECK(r.inserted == 1);
        CHECK(r.deleted == 0);
        REQUIRE(b.size() == 5);
        CHECK(b.back().center.x == doctest::Approx(0.0).scale(1));
        CHECK(b.back().center.y == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(distance(b.back().center, b[0].center) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("9 neighbours: deletion") {
        auto b = ring(9, 0.5, BubbleKind::Boundary);
        const auto r = qc_original(b, 5.0, 8.0, {});
        CHECK(r.deleted == 1);
        CHECK(b.size() == 9);
    }
    SUBCASE("isolated bubble gets a neighbour") {
        std::vector<Bubble> b{make_bubble({0, 0}, 0.5)};
        CHECK(qc_original(b, 5.0, 8.0, [](const Vec2&) { return 0.25; }).inserted == 1);
        REQUIRE(b.size() == 2);
        CHECK(b[1].radius == 0.25);
        CHECK(distance(b[0].center, b[1].center) == doctest::Approx(0.75).epsilon(1e-12));
    }
    SUBCASE("hexagonal packing is left alone") {
        auto [d, b] = hex_patch(4);
        const auto before = b;
        CHECK(qc_original(b, 5.0, 8.0, {}).changes() == 0);
        CHECK(b.size() == before.size());
    }
    CHECK_THROWS_AS([] {
        std::vector<Bubble> b;
        qc_original(b, 8.0, 5.0, {});
    }(), Error);
}

TEST_CASE("pairwise overlap") {
    CHECK(overlap_pairwise(make_bubble({0, 0}, 1), make_bubble({2, 0}, 1)) == 0.0);
    CHECK(overlap_pairwise(make_bubble({0, 0}, 1), make_bubble({0, 0}, 1)) == 2.0);
    CHECK(overlap_pairwise(make_bubble({0, 0}, 1), make_bubble({1.5, 0}, 1)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(overlap_pairwise(make_bubble({0, 0}, 1), make_bubble({3, 0}, 1)) < 0.0);
    CHECK(overlap_pairwise(make_bubble({0, 0}, 0.5), make_bubble({1, 0}, 1)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("boundary-region quantity control") {
    SUBCASE("nothing overlaps beyond the threshold") {
        std::vector<Bubble> b{make_bubble({0, 0}, 0.5, BubbleKind::Boundary), make_bubble({0.9, 0}, 0.5)};
        CHECK(qc_boundary_region(b, 1.0) == 0);
        CHECK(b.size() == 2);
    }
    SUBCASE("concentric mobile bubble is removed, anchors never") {
        std::vector<Bubble> b{make_bubble({0, 0}, 0.5, BubbleKind::Boundary), make_bubble({0, 0}, 0.5),
                              make_bubble({0.1, 0}, 0.5, BubbleKind::InteriorAnchor),
                              make_bubble({3, 0}, 0.5)};
        CHECK(qc_boundary_region(b, 1.0) == 1);
        REQUIRE(b.size() == 3);
        CHECK(b[0].kind == BubbleKind::Boundary);
        CHECK(b[1].kind == BubbleKind::InteriorAnchor);
        CHECK(b[2].center == Vec2{3, 0});
    }
    SUBCASE("idempotent and removal only on a packed plate") {
        std::vector<Bubble> b = initial_plane_bubbles(small_uniform_plate());
        const std::size_t before = b.size();
        const std::size_t anchors = std::count_if(b.begin(), b.end(), [](const Bubble& x) { return x.is_anchor(); });
        const std::size_t removed = qc_boundary_region(b, 0.3);
        CHECK(removed > 0);
        CHECK(b.size() == before - removed);
        CHECK(std::count_if(b.begin(), b.end(), [](const Bubble& x) { return x.is_anchor(); }) == anchors);
        for (const Bubble& a : b) {
            if (!a.is_anchor()) continue;
            for (const Bubble& m : b) {
                if (!m.is_anchor()) CHECK(overlap_pairwise(a, m) <= 0.3);
            }
        }
        const auto snapshot = b;
        CHECK(qc_boundary_region(b, 0.3) == 0);
        CHECK(b.size() == snapshot.size());
    }
}

TEST_CASE("relaxation of an equilibrium packing converges at once") {
    auto [d, b] = hex_patch(4);
    QcConfig qc;
    RelaxOptions opt;
    opt.record_timing = false;
    const RelaxResult r = relax_until_converged(b, d, DynamicsParams{}, ForceParams{}, qc, opt);
    CHECK(r.converged);
    CHECK(r.sweeps == 1);
    CHECK(r.trace.rows.size() == 2);
    CHECK(r.bubbles.size() == b.size());
    CHECK(r.trace.rows[0].min_angle_deg == doctest::Approx(60.0).epsilon(1e-9));
}

TEST_CASE("relaxation traces are deterministic and sweep indices increase") {
    PipelineConfig c = small_uniform_plate();
    PackingDomain d;
    const std::vector<Bubble> bubbles = initial_plane_bubbles(c, &d);
    RelaxOptions opt;
    opt.record_timing = false;
    for (QcStrategy strategy : {QcStrategy::New, QcStrategy::Original}) {
        QcConfig qc;
        qc.strategy = strategy;
        DynamicsParams dyn = c.dyn;
        dyn.max_sweeps = 60;
        const RelaxResult a = relax_until_converged(bubbles, d, dyn, c.force, qc, opt);
        const RelaxResult b = relax_until_converged(bubbles, d, dyn, c.force, qc, opt);
        CHECK(a.trace.to_csv() == b.trace.to_csv());
        REQUIRE(a.bubbles.size() == b.bubbles.size());
        for (std::size_t i = 0; i < a.bubbles.size(); ++i) CHECK(a.bubbles[i].center == b.bubbles[i].center);
        for (std::size_t k = 1; k < a.trace.rows.size(); ++k) CHECK(a.trace.rows[k].sweep > a.trace.rows[k - 1].sweep);
        // Boundary bubbles come back untouched.
        for (const Bubble& x : a.bubbles) {
            if (!x.is_fixed()) continue;
            CHECK(std::any_of(bubbles.begin(), bubbles.end(), [&](const Bubble& y) { return y.center == x.center; }));
        }
    }
}

TEST_CASE("trace CSV layout") {
    ConvergenceTrace t;
    t.rows.push_back({0, 10, 0.5, 20.0, 0.0});
    t.rows.push_back({1, 10, 0.25, 30.5, 0.125});
    CHECK(t.to_csv() == "sweep,bubble_count,max_force,min_angle_deg,elapsed_s\n0,10,0.5,20,0.000000\n1,10,0.25,30.5,0.125000\n");
}

TEST_CASE("new quantity control is insensitive to its threshold") {
    PipelineConfig c = small_uniform_plate();
    c.record_timing = false;
    double angle[2];
    int k = 0;
    for (double threshold : {1.0, 1.2}) {
        c.qc.threshold = threshold;
        PackingDomain d;
        const auto bubbles = initial_plane_bubbles(c, &d);
        RelaxOptions opt;
        opt.record_timing = false;
        const RelaxResult r = relax_until_converged(bubbles, d, c.dyn, c.force, c.qc, opt);
        CHECK(r.converged);
        const PlanarMesh mesh = delaunay_triangulate(std::span<const Bubble>(r.bubbles));
        angle[k++] = quality_report(mesh).min_angle;
    }
    CHECK(std::abs(angle[0] - angle[1]) < 2.0);
}

TEST_CASE("original quantity control: wider thresholds change fewer bubbles") {
    const PipelineConfig c = finalize_config(load_config(BUBBLEMESH_SOURCE_DIR "/configs/plate_graded.cfg"));
    PackingDomain d;
    const std::vector<Bubble> bubbles = initial_plane_bubbles(c, &d);
    const DomainIndex di(d);
    auto changes = [&](double lo, double hi) {
        std::vector<Bubble> b = bubbles;
        return qc_original(b, lo, hi, {}, &di).changes();
    };
    const int narrow = changes(5.0, 8.0), wide = changes(4.0, 10.0);
    MESSAGE("changes (5,8): " << narrow << ", (4,10): " << wide);
    CHECK(wide < narrow);
}
