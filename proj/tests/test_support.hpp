#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "bubblemesh/bubble.hpp"
#include "bubblemesh/mesh.hpp"
#include "bubblemesh/surface.hpp"

namespace testsupport {

using bubblemesh::Face;
using bubblemesh::PlanarMesh;
using bubblemesh::TriangleMesh;
using bubblemesh::Vec2;
using bubblemesh::Vec3;
using Rational = boost::multiprecision::cpp_rational;

// Structured (nu x nv cells) grid over [u0,u1] x [v0,v1], cells split along
// alternating diagonals. Parameter values are stored per vertex.
inline PlanarMesh grid_mesh(int nu, int nv, double u0 = 0.0, double u1 = 1.0, double v0 = 0.0,
                            double v1 = 1.0) {
    PlanarMesh m;
    for (int j = 0; j <= nv; ++j) {
        for (int i = 0; i <= nu; ++i) {
            m.vertices.push_back({u0 + (u1 - u0) * i / nu, v0 + (v1 - v0) * j / nv});
        }
    }
    auto id = [&](int i, int j) { return j * (nu + 1) + i; };
    for (int j = 0; j < nv; ++j) {
        for (int i = 0; i < nu; ++i) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            if ((i + j) % 2 == 0) {
                m.faces.push_back({a, b, c});
                m.faces.push_back({a, c, d});
            } else {
                m.faces.push_back({a, b, d});
                m.faces.push_back({b, c, d});
            }
        }
    }
    m.param = m.vertices;
    bubblemesh::assign_boundary_loop(m);
    return m;
}

// Grid in the parameter rectangle of `surface` lifted through its map.
inline TriangleMesh lifted_grid(const bubblemesh::ParametricSurface& surface, int nu, int nv) {
    const auto& d = surface.domain();
    const PlanarMesh g = grid_mesh(nu, nv, d.u0, d.u1, d.v0, d.v1);
    TriangleMesh m;
    for (const Vec2& p : g.vertices) m.vertices.push_back(surface.position(p.x, p.y));
    m.faces = g.faces;
    m.param = g.param;
    m.boundary_loop = g.boundary_loop;
    return m;
}

// lifted_grid with interior parameter points jittered by up to `amount` cells.
inline TriangleMesh jittered_lifted_grid(const bubblemesh::ParametricSurface& surface, int nu, int nv, double amount,
                                         std::uint64_t seed) {
    const auto& d = surface.domain();
    PlanarMesh g = grid_mesh(nu, nv, d.u0, d.u1, d.v0, d.v1);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> j(-amount, amount);
    const double hu = (d.u1 - d.u0) / nu, hv = (d.v1 - d.v0) / nv;
    std::set<int> boundary(g.boundary_loop.begin(), g.boundary_loop.end());
    TriangleMesh m;
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        Vec2 p = g.vertices[i];
        if (!boundary.count(static_cast<int>(i))) p += Vec2{j(rng) * hu, j(rng) * hv};
        m.vertices.push_back(surface.position(p.x, p.y));
        m.param.push_back(p);
    }
    m.faces = g.faces;
    m.boundary_loop = g.boundary_loop;
    return m;
}

// Annulus between circles of radius r0 < r1, n segments around.
inline PlanarMesh annulus_mesh(int n, double r0 = 1.0, double r1 = 2.0) {
    PlanarMesh m;
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * bubblemesh::kPi * k / n;
        m.vertices.push_back({r0 * std::cos(t), r0 * std::sin(t)});
        m.vertices.push_back({r1 * std::cos(t), r1 * std::sin(t)});
    }
    for (int k = 0; k < n; ++k) {
        const int i0 = 2 * k, o0 = 2 * k + 1, i1 = 2 * ((k + 1) % n), o1 = 2 * ((k + 1) % n) + 1;
        m.faces.push_back({i0, o0, o1});
        m.faces.push_back({i0, o1, i1});
    }
    return m;
}

inline TriangleMesh tetrahedron() {
    TriangleMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    m.faces = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
    return m;
}

inline std::vector<Vec2> random_points(std::size_t n, std::uint64_t seed, double lo = 0.0,
                                       double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<Vec2> pts(n);
    for (Vec2& p : pts) p = {u(rng), u(rng)};
    return pts;
}

// Exact orientation and in-circle determinants over rationals.
inline int exact_orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    const Rational ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    const Rational d = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

inline int exact_incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const Rational adx = Rational(a.x) - d.x, ady = Rational(a.y) - d.y;
    const Rational bdx = Rational(b.x) - d.x, bdy = Rational(b.y) - d.y;
    const Rational cdx = Rational(c.x) - d.x, cdy = Rational(c.y) - d.y;
    const Rational det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) -
                         (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady) +
                         (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
    return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

// Brute-force empty-circumcircle check: returns the number of (face, point)
// pairs with the point strictly inside the face's circumcircle.
inline int circumcircle_violations(const PlanarMesh& mesh, const std::vector<Vec2>& points) {
    int bad = 0;
    for (const Face& f : mesh.faces) {
        Vec2 a = mesh.vertices[f[0]], b = mesh.vertices[f[1]], c = mesh.vertices[f[2]];
        if (exact_orient(a, b, c) < 0) std::swap(b, c);
        for (const Vec2& p : points) {
            if (p == a || p == b || p == c) continue;
            if (exact_incircle(a, b, c, p) > 0) ++bad;
        }
    }
    return bad;
}

// Loops of boundary edges found by walking directed edges that have no twin.
inline int count_boundary_loops(const std::vector<Face>& faces) {
    std::map<std::pair<int, int>, int> directed;
    for (const Face& f : faces) {
        for (int k = 0; k < 3; ++k) directed[{f[k], f[(k + 1) % 3]}]++;
    }
    std::map<int, int> next;
    for (const auto& [e, n] : directed) {
        if (!directed.count({e.second, e.first})) next[e.first] = e.second;
    }
    std::set<int> seen;
    int loops = 0;
    for (const auto& [start, unused] : next) {
        if (seen.count(start)) continue;
        ++loops;
        int v = start;
        while (!seen.count(v)) {
            seen.insert(v);
            v = next.at(v);
        }
    }
    return loops;
}

}  // namespace testsupport
