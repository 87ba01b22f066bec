#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "bubblemesh/sizing.hpp"
#include "bubblemesh/surface.hpp"

using namespace bubblemesh;

namespace {

// Independent evaluation of the chord-error edge factor.
double g_oracle(double e) { return (1.0 - e) * std::sqrt(40.0 * (1.0 - std::pow(1.0 - 1.2 * e, 0.5))); }

// Largest singular value of (fu, fv) from the closed-form eigenvalues of the
// first fundamental form.
double sigma1_oracle(const SurfaceJet& j) {
    const double E = dot(j.fu, j.fu), F = dot(j.fu, j.fv), G = dot(j.fv, j.fv);
    const double tr = E + G, det = E * G - F * F;
    return std::sqrt(0.5 * tr + std::sqrt(0.25 * tr * tr - det));
}

std::vector<std::unique_ptr<ParametricSurface>> catalog() {
    std::vector<std::unique_ptr<ParametricSurface>> s;
    s.push_back(make_surface("plane", {{"u0", -1}, {"u1", 1}, {"v0", 0}, {"v1", 2}, {"su", 1.5}}));
    s.push_back(make_surface("sphere", {{"u0", -0.8}, {"u1", 0.8}, {"v0", -0.8}, {"v1", 0.8}, {"radius", 2}}));
    s.push_back(make_surface("cylinder", {{"u0", 0}, {"u1", 2}, {"v0", 0}, {"v1", 1}, {"radius", 0.7}}));
    s.push_back(make_surface("torus", {{"u0", 0}, {"u1", 1}, {"v0", -1.5}, {"v1", 1.5}}));
    s.push_back(make_surface("wavy", {{"u0", 0}, {"u1", 3}, {"v0", 0}, {"v1", 3}, {"amplitude", 0.4}}));
    return s;
}

}  // namespace

TEST_CASE("g(eps) against direct evaluation") {
    CHECK(g_of_eps(0.01) == doctest::Approx(g_oracle(0.01)).epsilon(1e-14));
    CHECK(g_of_eps(0.01) == doctest::Approx(0.48574).epsilon(1e-4));
    CHECK(g_of_eps(0.02) > g_of_eps(0.01));
    CHECK(g_of_eps(1e-12) < 1e-5);
    double prev = 0.0;
    for (double e = 0.001; e <= 0.05; e += 0.001) {
        const double g = g_of_eps(e);
        CHECK(g > prev);
        prev = g;
    }
    CHECK_THROWS_AS(g_of_eps(0.0), Error);
    CHECK_THROWS_AS(g_of_eps(1.0 / 1.2), Error);
    CHECK_THROWS_AS(g_of_eps(-0.1), Error);
}

TEST_CASE("surface jets agree with finite differences of the position") {
    const double h = 1e-5;
    for (const auto& s : catalog()) {
        const auto& d = s->domain();
        for (int k = 1; k < 4; ++k) {
            const double u = d.u0 + (d.u1 - d.u0) * k / 4.0;
            const double v = d.v0 + (d.v1 - d.v0) * (4 - k) / 4.0;
            const SurfaceJet j = s->jet(u, v);
            auto P = [&](double a, double b) { return s->position(a, b); };
            const Vec3 fu = (P(u + h, v) - P(u - h, v)) / (2 * h);
            const Vec3 fv = (P(u, v + h) - P(u, v - h)) / (2 * h);
            const Vec3 fuu = (P(u + h, v) - P(u, v) * 2.0 + P(u - h, v)) / (h * h);
            const Vec3 fvv = (P(u, v + h) - P(u, v) * 2.0 + P(u, v - h)) / (h * h);
            const Vec3 fuv = (P(u + h, v + h) - P(u + h, v - h) - P(u - h, v + h) + P(u - h, v - h)) / (4 * h * h);
            INFO(s->name());
            CHECK(distance(j.fu, fu) < 1e-8);
            CHECK(distance(j.fv, fv) < 1e-8);
            CHECK(distance(j.fuu, fuu) < 1e-4);
            CHECK(distance(j.fvv, fvv) < 1e-4);
            CHECK(distance(j.fuv, fuv) < 1e-4);
        }
    }
}

TEST_CASE("maximum normal curvature") {
    const PlaneSurface plane({0, 1, 0, 1});
    CHECK(max_normal_curvature(plane, 0.3, 0.7) == 0.0);

    for (double R : {1.0, 2.5}) {
        const SpherePatch sphere({-1, 1, -1, 1}, R);
        for (auto [u, v] : {std::pair{0.1, 0.2}, {-0.7, 0.5}, {0.0, -0.9}}) {
            CHECK(max_normal_curvature(sphere, u, v) == doctest::Approx(1.0 / R).epsilon(1e-9));
            const auto [k1, k2] = principal_curvatures(sphere, u, v);
            CHECK(std::abs(std::abs(k1) - std::abs(k2)) < 1e-9);
        }
        const CylinderPatch cyl({0, 3, 0, 1}, R);
        CHECK(max_normal_curvature(cyl, 1.3, 0.4) == doctest::Approx(1.0 / R).epsilon(1e-9));
        const auto [c1, c2] = principal_curvatures(cyl, 1.3, 0.4);
        CHECK(std::min(std::abs(c1), std::abs(c2)) < 1e-12);
    }

    // Torus: curvatures 1/r across the tube and cos v / (R + r cos v) along it.
    const TorusPatch torus({0, 1, -1.5, 1.5}, 2.0, 0.5);
    for (double v : {-1.2, 0.0, 0.8}) {
        const auto [k1, k2] = principal_curvatures(torus, 0.4, v);
        const double a = std::max(std::abs(k1), std::abs(k2));
        const double b = std::min(std::abs(k1), std::abs(k2));
        CHECK(a == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(b == doctest::Approx(std::abs(std::cos(v) / (2.0 + 0.5 * std::cos(v)))).epsilon(1e-9));
    }

    const SpherePatch pole_patch({-1, 1, 0, kPi / 2}, 1.0);
    CHECK_THROWS_WITH_AS(max_normal_curvature(pole_patch, 0.0, kPi / 2), doctest::Contains("irregular"), Error);
}

TEST_CASE("allowable 3D edge length") {
    SizingParams p;
    p.epsilon = 0.01;
    const PlaneSurface plane({0, 1, 0, 1});
    CHECK(std::isinf(allowable_edge_3d(plane, 0.5, 0.5, p)));
    const SpherePatch s1({-1, 1, -1, 1}, 1.0);
    const SpherePatch s2({-1, 1, -1, 1}, 2.0);
    CHECK(allowable_edge_3d(s1, 0.2, 0.1, p) == doctest::Approx(g_oracle(0.01)).epsilon(1e-9));
    CHECK(allowable_edge_3d(s2, 0.2, 0.1, p) == doctest::Approx(2.0 * g_oracle(0.01)).epsilon(1e-9));
    CHECK(allowable_edge_3d(s2, 0.2, 0.1, p) == doctest::Approx(0.97148).epsilon(1e-4));
}

TEST_CASE("largest singular value of the Jacobian") {
    CHECK(sigma1(PlaneSurface({0, 1, 0, 1}), 0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sigma1(PlaneSurface({0, 1, 0, 1}, 2.0, 1.0), 0.5, 0.5) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sigma1(CylinderPatch({0, 6, 0, 1}, 1.0), 2.0, 0.3) == doctest::Approx(1.0).epsilon(1e-14));
    for (const auto& s : catalog()) {
        const auto& d = s->domain();
        for (int k = 0; k <= 4; ++k) {
            const double u = d.u0 + (d.u1 - d.u0) * k / 4.0;
            const double v = d.v0 + (d.v1 - d.v0) * (k % 3) / 2.0;
            const SurfaceJet j = s->jet(u, v);
            const double ref = sigma1_oracle(j);
            INFO(s->name());
            CHECK(std::abs(sigma1(*s, u, v) - ref) <= 1e-12 * ref);
        }
    }
}

TEST_CASE("radius bound") {
    SizingParams p;
    p.epsilon = 0.01;
    p.r_min = 0.01;
    p.r_max = 0.5;
    CHECK(radius_bound(PlaneSurface({0, 1, 0, 1}), 0.2, 0.2, p) == 0.5);

    const SpherePatch unit({-1, 1, -1, 1}, 1.0);
    for (auto [u, v] : {std::pair{0.0, 0.0}, {0.5, 0.6}, {-0.3, -0.9}}) {
        const double expected = std::min(p.r_max, g_oracle(0.01) / (2.0 * sigma1(unit, u, v)));
        CHECK(radius_bound(unit, u, v, p) == doctest::Approx(expected).epsilon(1e-12));
    }

    SizingParams uniform = p;
    uniform.r_min = uniform.r_max = 0.2;
    const WavySurface wavy({0, 3, 0, 3}, 0.5, 2, 2);
    for (double t = 0.0; t <= 3.0; t += 0.37) CHECK(radius_bound(wavy, t, 3.0 - t, uniform) == 0.2);

    SizingParams bad = p;
    bad.r_min = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = p;
    bad.epsilon = 0.9;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("scale covariance on spheres R and tR") {
    SizingParams p;
    p.epsilon = 0.005;
    p.r_min = 1e-6;
    p.r_max = 1e6;
    const double t = 3.0;
    const SpherePatch a({-1, 1, -1, 1}, 1.3);
    const SpherePatch b({-1, 1, -1, 1}, 1.3 * t);
    for (auto [u, v] : {std::pair{0.1, 0.1}, {0.8, -0.4}}) {
        CHECK(allowable_edge_3d(b, u, v, p) == doctest::Approx(t * allowable_edge_3d(a, u, v, p)).epsilon(1e-12));
        CHECK(sigma1(b, u, v) == doctest::Approx(t * sigma1(a, u, v)).epsilon(1e-12));
        // The parameter-space bound is scale free.
        CHECK(radius_bound(b, u, v, p) == doctest::Approx(radius_bound(a, u, v, p)).epsilon(1e-12));
    }
}

TEST_CASE("radius bound is continuous over the built-in surfaces") {
    SizingParams p;
    p.epsilon = 0.01;
    p.r_min = 0.005;
    p.r_max = 0.5;
    for (const auto& s : catalog()) {
        const auto& d = s->domain();
        const auto bound = make_radius_bound(*s, p);
        const int n = 2000;
        double prev = bound({d.u0, d.v0});
        double worst = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double t = static_cast<double>(k) / n;
            const double r = bound({d.u0 + t * (d.u1 - d.u0), d.v0 + t * (d.v1 - d.v0)});
            CHECK(r > 0.0);
            CHECK(std::isfinite(r));
            worst = std::max(worst, std::abs(r - prev) / std::max(r, prev));
            prev = r;
        }
        INFO(s->name());
        CHECK(worst < 0.02);
    }
}
