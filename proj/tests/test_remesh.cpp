#include <doctest.h>

#include <cmath>

#include "bubblemesh/conformal.hpp"
#include "bubblemesh/delaunay.hpp"
#include "bubblemesh/locate.hpp"
#include "bubblemesh/packing.hpp"
#include "bubblemesh/remesh.hpp"
#include "bubblemesh/surface.hpp"
#include "test_support.hpp"

using namespace bubblemesh;

namespace {

PlanarMesh polygon_fan(const std::vector<Vec2>& loop_points, const Vec2& center) {
    PlanarMesh m;
    m.vertices = loop_points;
    m.vertices.push_back(center);
    const int c = static_cast<int>(loop_points.size());
    for (int k = 0; k < c; ++k) m.faces.push_back({k, (k + 1) % c, c});
    assign_boundary_loop(m);
    return m;
}

// Triangulated hexagon of side n on the triangular lattice with spacing h.
PlanarMesh lattice_hexagon(int n, double h) {
    std::vector<Bubble> pts;
    const Vec2 e1{h, 0}, e2{0.5 * h, std::sqrt(3.0) / 2.0 * h};
    // Boundary in loop order, then interior points.
    const Vec2 corners[6] = {e1 * n, e2 * n, (e2 - e1) * n, e1 * -n, e2 * -n, (e1 - e2) * n};
    for (int s = 0; s < 6; ++s) {
        for (int k = 0; k < n; ++k) {
            Bubble b;
            b.center = corners[s] + (corners[(s + 1) % 6] - corners[s]) * (static_cast<double>(k) / n);
            b.radius = 0.5 * h;
            b.kind = BubbleKind::Boundary;
            b.loop = 0;
            pts.push_back(b);
        }
    }
    for (int i = -n; i <= n; ++i) {
        for (int j = -n; j <= n; ++j) {
            if (std::max({std::abs(i), std::abs(j), std::abs(i + j)}) >= n) continue;
            Bubble b;
            b.center = e1 * i + e2 * j;
            b.radius = 0.5 * h;
            pts.push_back(b);
        }
    }
    PlanarMesh m = delaunay_triangulate(std::span<const Bubble>(pts));
    assign_boundary_loop(m);
    return m;
}

}  // namespace

TEST_CASE("boundary reconstruction") {
    SUBCASE("uniform boundary edges give tangent bubbles of radius L/2") {
        std::vector<Vec2> square{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
        const PlanarMesh m = polygon_fan(square, {1, 1});
        const auto b = reconstruct_boundary_bubbles(m);
        REQUIRE(b.size() == 8);
        for (std::size_t k = 0; k < b.size(); ++k) {
            CHECK(b[k].radius == 0.5);
            CHECK(b[k].kind == BubbleKind::Boundary);
            const Bubble& n = b[(k + 1) % b.size()];
            CHECK(distance(b[k].center, n.center) == b[k].radius + n.radius);
        }
    }
    SUBCASE("edges 1 and 3 give radius 1") {
        const PlanarMesh m = polygon_fan({{0, 0}, {1, 0}, {1, 3}, {-2, 3}}, {0, 1.5});
        const auto b = reconstruct_boundary_bubbles(m);
        const auto it = std::find_if(b.begin(), b.end(), [](const Bubble& x) { return x.center == Vec2{1, 0}; });
        REQUIRE(it != b.end());
        CHECK(it->radius == 1.0);
    }
    SUBCASE("3-4-5 triangle") {
        PlanarMesh m;
        m.vertices = {{0, 0}, {3, 0}, {0, 4}};
        m.faces = {{0, 1, 2}};
        assign_boundary_loop(m);
        const auto b = reconstruct_boundary_bubbles(m);
        REQUIRE(b.size() == 3);
        auto radius_at = [&](Vec2 p) {
            for (const Bubble& x : b) {
                if (x.center == p) return x.radius;
            }
            return -1.0;
        };
        CHECK(radius_at({0, 0}) == 1.75);  // edges 3 and 4
        CHECK(radius_at({3, 0}) == 2.0);   // edges 3 and 5
        CHECK(radius_at({0, 4}) == 2.25);  // edges 4 and 5
    }
    SUBCASE("zero-length boundary edge") {
        PlanarMesh m;
        m.vertices = {{0, 0}, {1, 0}, {1, 0}, {0, 1}};
        m.faces = {{0, 1, 3}, {1, 2, 3}};
        m.boundary_loop = {0, 1, 2, 3};
        CHECK_THROWS_WITH_AS(reconstruct_boundary_bubbles(m), doctest::Contains("zero-length boundary edge"), Error);
    }
}

TEST_CASE("interior reconstruction") {
    SUBCASE("equal edges give L/2 for any degree") {
        for (int degree : {3, 5, 6, 7, 9}) {
            std::vector<Vec2> ring;
            for (int k = 0; k < degree; ++k) {
                const double t = 2 * kPi * k / degree;
                ring.push_back({0.8 * std::cos(t), 0.8 * std::sin(t)});
            }
            const PlanarMesh m = polygon_fan(ring, {0, 0});
            const auto b = reconstruct_interior_bubbles(m);
            REQUIRE(b.size() == 1);
            CHECK(b[0].radius == doctest::Approx(0.4).epsilon(1e-15));
            CHECK(b[0].kind == BubbleKind::InteriorAnchor);
        }
    }
    SUBCASE("hand-worked weights") {
        const std::vector<double> two{1.0, 2.0};
        const auto w = reconstruction_weights(two);
        CHECK(w[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(w[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(0.5 * (w[0] * 1.0 + w[1] * 2.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        const std::vector<double> skew{1.0, 1.0, 100.0};
        const auto v = reconstruction_weights(skew);
        const double r = 0.5 * (v[0] + v[1] + v[2] * 100.0);
        CHECK(r < 1.0);
        CHECK(r == doctest::Approx(0.75).epsilon(0.01 / 0.75));
    }
    SUBCASE("weights sum to one") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> len(1e-3, 50.0);
        std::uniform_int_distribution<int> deg(1, 12);
        for (int t = 0; t < 500; ++t) {
            std::vector<double> l(deg(rng));
            for (double& x : l) x = len(rng);
            double s = 0.0;
            for (double w : reconstruction_weights(l)) s += w;
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }
    }
    SUBCASE("isolated vertex") {
        PlanarMesh m;
        m.vertices = {{0, 0}, {1, 0}, {0, 1}, {5, 5}};
        m.faces = {{0, 1, 2}};
        m.boundary_loop = {0, 1, 2};
        CHECK_THROWS_WITH_AS(reconstruct_interior_bubbles(m), doctest::Contains("isolated vertex 3"), Error);
    }
}

TEST_CASE("gap filling") {
    SUBCASE("single triangle has no room") {
        PlanarMesh m;
        m.vertices = {{0, 0}, {1, 0}, {0.5, 0.8}};
        m.faces = {{0, 1, 2}};
        assign_boundary_loop(m);
        const auto anchors = reconstruct_boundary_bubbles(m);
        CHECK(fill_gaps(m, anchors).empty());
    }
    SUBCASE("an already dense planar mesh gains few bubbles") {
        const PlanarMesh flat = flatten(to_spatial(lattice_hexagon(6, 1.0))).flat;
        std::vector<Bubble> anchors = reconstruct_boundary_bubbles(flat);
        const auto interior = reconstruct_interior_bubbles(flat);
        anchors.insert(anchors.end(), interior.begin(), interior.end());
        const auto gaps = fill_gaps(flat, anchors);
        MESSAGE("anchors " << anchors.size() << ", inserted " << gaps.size());
        CHECK(static_cast<double>(gaps.size()) < 0.05 * anchors.size());
        for (const Bubble& g : gaps) CHECK(g.kind == BubbleKind::Mobile);
    }
    SUBCASE("stretched regions of a flattened sphere cap receive the insertions") {
        const SpherePatch cap({-1.4, 1.4, -1.4, 1.4}, 1.0);
        const TriangleMesh m = testsupport::lifted_grid(cap, 12, 12);
        const FlattenResult fr = flatten(m);
        std::vector<Bubble> anchors = reconstruct_boundary_bubbles(fr.flat);
        const auto interior = reconstruct_interior_bubbles(fr.flat);
        anchors.insert(anchors.end(), interior.begin(), interior.end());
        const auto gaps = fill_gaps(fr.flat, anchors);
        REQUIRE(!gaps.empty());
        // Mean edge scale per face, split into quartiles.
        const EdgeAdjacency adj = build_edge_adjacency(m.faces, m.vertices.size());
        std::vector<double> face_scale(m.faces.size());
        for (std::size_t f = 0; f < m.faces.size(); ++f) {
            double s = 0.0;
            for (int e : adj.face_edges[f]) s += fr.edge_scale.scale[e];
            face_scale[f] = s / 3.0;
        }
        std::vector<double> sorted = face_scale;
        std::sort(sorted.begin(), sorted.end());
        const double q1 = sorted[sorted.size() / 4], q3 = sorted[3 * sorted.size() / 4];
        double area_lo = 0, area_hi = 0;
        int in_lo = 0, in_hi = 0;
        for (std::size_t f = 0; f < m.faces.size(); ++f) {
            const Face& fc = fr.flat.faces[f];
            const double a = triangle_area(fr.flat.vertices[fc[0]], fr.flat.vertices[fc[1]], fr.flat.vertices[fc[2]]);
            if (face_scale[f] <= q1) area_lo += a;
            if (face_scale[f] >= q3) area_hi += a;
        }
        const PointLocator loc(fr.flat);
        for (const Bubble& g : gaps) {
            const int f = loc.locate(g.center).face;
            if (face_scale[f] <= q1) ++in_lo;
            if (face_scale[f] >= q3) ++in_hi;
        }
        MESSAGE("insertions in top quartile " << in_hi << ", bottom quartile " << in_lo);
        CHECK(in_hi >= 3);
        CHECK(in_hi / area_hi > in_lo / area_lo);
    }
}

TEST_CASE("re-meshing a good planar mesh keeps its quality and its boundary") {
    const PlanarMesh flat = lattice_hexagon(7, 0.5);
    const double before = quality_report(flat).min_angle;
    RemeshOptions opt;
    opt.relax.record_timing = false;
    const RemeshResult r = remesh_planar(flat, opt);
    const double after = quality_report(r.mesh).min_angle;
    CHECK(after >= before - 2.0);
    CHECK(r.converged);
    CHECK(r.mesh.vertices.size() == r.bubbles.size());
    CHECK(r.reconstructed == flat.vertices.size());
    CHECK(r.bubbles.size() <= r.reconstructed + r.inserted);
    CHECK(r.bubbles.size() == r.reconstructed + r.inserted - r.removed);
    // Boundary bubbles come back at their reconstructed positions.
    const auto boundary = reconstruct_boundary_bubbles(flat);
    for (std::size_t k = 0; k < boundary.size(); ++k) {
        CHECK(r.bubbles[k].center == boundary[k].center);
        CHECK(r.bubbles[k].kind == BubbleKind::Boundary);
    }
}

TEST_CASE("re-meshing a distorted flat mesh removes its poor triangles") {
    const SpherePatch cap({-1.0, 1.0, -1.0, 1.0}, 1.0);
    const FlattenResult fr = flatten(testsupport::jittered_lifted_grid(cap, 14, 14, 0.4, 3));
    RemeshOptions opt;
    opt.relax.record_timing = false;
    const RemeshResult r = remesh_planar(fr.flat, opt);
    const auto q = quality_report(r.mesh);
    const auto before = quality_report(fr.flat);
    MESSAGE("min angle " << before.min_angle << " -> " << q.min_angle);
    REQUIRE(before.min_angle_histogram[0] > 0);
    CHECK(q.min_angle_histogram[0] == 0);
    CHECK(q.min_angle >= before.min_angle + 10.0);
}
