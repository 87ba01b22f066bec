#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "bubblemesh/conformal.hpp"
#include "bubblemesh/surface.hpp"
#include "test_support.hpp"

using namespace bubblemesh;
using testsupport::grid_mesh;
using testsupport::lifted_grid;

namespace {

TriangleMesh jittered_planar(int nu, int nv, std::uint64_t seed) {
    PlanarMesh g = grid_mesh(nu, nv, 0.0, 2.0, 0.0, 1.3);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> j(-0.2, 0.2);
    const double hx = 2.0 / nu, hy = 1.3 / nv;
    for (Vec2& p : g.vertices) p += Vec2{j(rng) * hx, j(rng) * hy};
    return to_spatial(g);
}

// Ratio of singular values of the affine map taking the 3D face (in its own
// plane) to the flat face, via a full SVD.
double distortion_oracle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec2& p, const Vec2& q, const Vec2& r) {
    Eigen::Vector3d e1(b.x - a.x, b.y - a.y, b.z - a.z), e2(c.x - a.x, c.y - a.y, c.z - a.z);
    Eigen::Matrix<double, 3, 2> E;
    E << e1, e2;
    Eigen::Matrix2d F;
    F << q.x - p.x, r.x - p.x, q.y - p.y, r.y - p.y;
    // Orthonormal basis of the face plane.
    const Eigen::HouseholderQR<Eigen::Matrix<double, 3, 2>> qr(E);
    const Eigen::Matrix<double, 3, 2> basis = qr.householderQ() * Eigen::Matrix<double, 3, 2>::Identity();
    const Eigen::Matrix2d P = basis.transpose() * E;
    const Eigen::Matrix2d J = F * P.inverse();
    const Eigen::JacobiSVD<Eigen::Matrix2d> svd(J);
    return svd.singularValues()(0) / svd.singularValues()(1);
}

double max_angle_error(const TriangleMesh& m, const PlanarMesh& f) {
    double worst = 0.0;
    for (const Face& face : m.faces) {
        const auto a = triangle_angles(m.vertices[face[0]], m.vertices[face[1]], m.vertices[face[2]]);
        const auto b = triangle_angles(f.vertices[face[0]], f.vertices[face[1]], f.vertices[face[2]]);
        for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    }
    return worst;
}

}  // namespace

TEST_CASE("planar input flattens to a congruent mesh") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const TriangleMesh m = jittered_planar(9, 7, seed);
        const FlattenResult r = flatten(m);
        CHECK(r.flat.faces == m.faces);
        CHECK(max_angle_error(m, r.flat) < 1e-9);
        for (double s : r.edge_scale.scale) CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.max_distortion < 1.0 + 1e-9);
        // Centred at the origin with the surface area.
        double area = 0.0;
        for (const Face& f : r.flat.faces) {
            const double a = signed_area(r.flat.vertices[f[0]], r.flat.vertices[f[1]], r.flat.vertices[f[2]]);
            CHECK(a > 0.0);
            area += a;
        }
        const double surface_area = std::abs(polygon_area(to_planar(m).vertices, r.flat.boundary_loop));
        CHECK(area == doctest::Approx(surface_area).epsilon(1e-12));
    }
}

TEST_CASE("a developable cylinder patch unrolls with small distortion") {
    const CylinderPatch cyl({0.0, 2.0, 0.0, 1.5}, 1.0);
    const TriangleMesh m = lifted_grid(cyl, 20, 12);
    const FlattenResult r = flatten(m);
    CHECK(r.flat.faces == m.faces);
    CHECK(r.max_distortion < 1.01);
    // Oracle: the analytic unrolling (R u, v).
    PlanarMesh unrolled;
    for (const Vec2& p : m.param) unrolled.vertices.push_back({1.0 * p.x, p.y});
    unrolled.faces = m.faces;
    double worst = 0.0;
    for (const Face& f : m.faces) {
        const auto a = triangle_angles(unrolled.vertices[f[0]], unrolled.vertices[f[1]], unrolled.vertices[f[2]]);
        const auto b = triangle_angles(r.flat.vertices[f[0]], r.flat.vertices[f[1]], r.flat.vertices[f[2]]);
        for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    }
    CHECK(degrees(worst) < 0.5);
}

TEST_CASE("distortion matches an SVD oracle") {
    const SpherePatch sphere({-0.7, 0.7, -0.7, 0.7}, 1.0);
    const TriangleMesh m = lifted_grid(sphere, 8, 8);
    const FlattenResult r = flatten(m);
    REQUIRE(r.distortion.size() == m.faces.size());
    for (std::size_t i = 0; i < m.faces.size(); ++i) {
        const Face& f = m.faces[i];
        const double ref = distortion_oracle(m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]], r.flat.vertices[f[0]],
                                             r.flat.vertices[f[1]], r.flat.vertices[f[2]]);
        CHECK(r.distortion[i] == doctest::Approx(ref).epsilon(1e-9));
        CHECK(r.distortion[i] >= 1.0);
    }
}

TEST_CASE("sphere cap distortion decreases under refinement") {
    const SpherePatch cap({-0.9, 0.9, -0.9, 0.9}, 1.0);
    const FlattenResult coarse = flatten(lifted_grid(cap, 8, 8));
    const FlattenResult fine = flatten(lifted_grid(cap, 16, 16));
    CHECK(fine.mean_distortion < coarse.mean_distortion);
    for (const FlattenResult* r : {&coarse, &fine}) {
        for (const Face& f : r->flat.faces) {
            CHECK(signed_area(r->flat.vertices[f[0]], r->flat.vertices[f[1]], r->flat.vertices[f[2]]) > 0.0);
        }
    }
}

TEST_CASE("conformal factors") {
    const TriangleMesh planar = jittered_planar(5, 4, 9);
    SUBCASE("identity") {
        const EdgeScales s = conformal_factors(planar, to_planar(planar));
        for (double x : s.scale) CHECK(std::abs(x - 1.0) <= 4e-16);
    }
    SUBCASE("uniform scale by 2") {
        PlanarMesh twice = to_planar(planar);
        for (Vec2& p : twice.vertices) p *= 2.0;
        const EdgeScales s = conformal_factors(planar, twice);
        for (double x : s.scale) CHECK(x == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(std::is_sorted(s.edges.begin(), s.edges.end()));
    }
    SUBCASE("sphere cap has a spread of factors") {
        const SpherePatch cap({-0.9, 0.9, -0.9, 0.9}, 1.0);
        const TriangleMesh m = lifted_grid(cap, 12, 12);
        const FlattenResult r = flatten(m);
        const auto [lo, hi] = std::minmax_element(r.edge_scale.scale.begin(), r.edge_scale.scale.end());
        CHECK(*hi / *lo > 1.0);
        for (double x : r.edge_scale.scale) CHECK(x > 0.0);
        // Recomputing from the returned flat mesh reproduces the stored factors.
        const EdgeScales again = conformal_factors(m, r.flat);
        REQUIRE(again.scale.size() == r.edge_scale.scale.size());
        for (std::size_t i = 0; i < again.scale.size(); ++i) {
            CHECK(std::abs(again.scale[i] - r.edge_scale.scale[i]) <= 1e-12);
        }
    }
    SUBCASE("connectivity mismatch") {
        PlanarMesh other = to_planar(planar);
        std::swap(other.faces[0], other.faces[1]);
        CHECK_THROWS_AS(conformal_factors(planar, other), Error);
    }
}

TEST_CASE("flattening rejects non-disk input") {
    CHECK_THROWS_AS(flatten(to_spatial(testsupport::annulus_mesh(10))), Error);
    CHECK_THROWS_AS(flatten(testsupport::tetrahedron()), Error);
    TriangleMesh degenerate;
    degenerate.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    degenerate.faces = {{0, 1, 2}};
    CHECK_THROWS_WITH_AS(flatten(degenerate), doctest::Contains("degenerate"), Error);
}
