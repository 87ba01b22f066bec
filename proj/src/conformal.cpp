#include "bubblemesh/conformal.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bubblemesh {

namespace {

double cotangent(const Vec3& apex, const Vec3& p, const Vec3& q) {
    const Vec3 u = p - apex, v = q - apex;
    const double s = norm(cross(u, v));
    if (s == 0.0) throw Error("degenerate face in flattening input");
    return dot(u, v) / s;
}

// Vertex of the loop whose arc-length position is nearest half the perimeter.
int opposite_on_loop(const TriangleMesh& mesh, const std::vector<int>& loop) {
    std::vector<double> arc(loop.size() + 1, 0.0);
    for (std::size_t i = 0; i < loop.size(); ++i) {
        arc[i + 1] = arc[i] + distance(mesh.vertices[loop[i]], mesh.vertices[loop[(i + 1) % loop.size()]]);
    }
    const double half = 0.5 * arc.back();
    std::size_t best = 1;
    for (std::size_t i = 1; i < loop.size(); ++i) {
        if (std::abs(arc[i] - half) < std::abs(arc[best] - half)) best = i;
    }
    return loop[best];
}

}  // namespace

FlattenResult flatten(const TriangleMesh& mesh) {
    const ValidationResult valid = validate_disk_topology(mesh);
    if (!valid) throw Error("flattening input: " + valid.message);
    const int deg = find_degenerate_face(mesh);
    if (deg >= 0) throw Error("flattening input: degenerate face " + std::to_string(deg));

    const int n = static_cast<int>(mesh.vertices.size());
    const auto loops = boundary_loops(mesh.faces, mesh.vertices.size());
    const std::vector<int>& loop = loops.front();
    const int p0 = loop.front();
    const int p1 = opposite_on_loop(mesh, loop);
    const double pin_distance = distance(mesh.vertices[p0], mesh.vertices[p1]);

    // Conformal energy E_D - A as a quadratic form over (x0, y0, x1, y1, ...).
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.faces.size() * 18 + loop.size() * 4);
    for (const Face& f : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            const int i = f[(k + 1) % 3], j = f[(k + 2) % 3];
            const double w = 0.5 * cotangent(mesh.vertices[f[k]], mesh.vertices[i], mesh.vertices[j]);
            for (int d = 0; d < 2; ++d) {
                trip.emplace_back(2 * i + d, 2 * i + d, w);
                trip.emplace_back(2 * j + d, 2 * j + d, w);
                trip.emplace_back(2 * i + d, 2 * j + d, -w);
                trip.emplace_back(2 * j + d, 2 * i + d, -w);
            }
        }
    }
    for (std::size_t e = 0; e < loop.size(); ++e) {
        const int i = loop[e], j = loop[(e + 1) % loop.size()];
        trip.emplace_back(2 * i, 2 * j + 1, -0.5);
        trip.emplace_back(2 * j + 1, 2 * i, -0.5);
        trip.emplace_back(2 * j, 2 * i + 1, 0.5);
        trip.emplace_back(2 * i + 1, 2 * j, 0.5);
    }

    // Unknown numbering with the four pinned coordinates removed.
    std::vector<int> slot(2 * n, -1);
    int free_count = 0;
    for (int v = 0; v < n; ++v) {
        if (v == p0 || v == p1) continue;
        slot[2 * v] = free_count++;
        slot[2 * v + 1] = free_count++;
    }
    Eigen::VectorXd pinned = Eigen::VectorXd::Zero(2 * n);
    pinned[2 * p1] = pin_distance;

    std::vector<Eigen::Triplet<double>> reduced;
    reduced.reserve(trip.size());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(free_count);
    for (const auto& t : trip) {
        const int r = slot[t.row()], c = slot[t.col()];
        if (r < 0) continue;
        if (c >= 0) {
            reduced.emplace_back(r, c, t.value());
        } else {
            rhs[r] -= t.value() * pinned[t.col()];
        }
    }
    Eigen::SparseMatrix<double> A(free_count, free_count);
    A.setFromTriplets(reduced.begin(), reduced.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(A);
    if (solver.info() != Eigen::Success) throw Error("flattening: singular conformal system (factorisation failed)");
    const Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !x.allFinite()) throw Error("flattening: conformal solve failed");

    FlattenResult out;
    PlanarMesh& flat = out.flat;
    flat.faces = mesh.faces;
    flat.boundary_loop = loop;
    flat.param = mesh.param;
    flat.vertices.resize(n);
    for (int v = 0; v < n; ++v) {
        flat.vertices[v] = slot[2 * v] < 0 ? Vec2{pinned[2 * v], pinned[2 * v + 1]}
                                           : Vec2{x[slot[2 * v]], x[slot[2 * v + 1]]};
    }

    int positive = 0, negative = 0;
    for (const Face& f : flat.faces) {
        const double a = signed_area(flat.vertices[f[0]], flat.vertices[f[1]], flat.vertices[f[2]]);
        if (a > 0.0) ++positive;
        else ++negative;
    }
    if (positive == 0) {
        for (Vec2& p : flat.vertices) p.y = -p.y;
    } else if (negative > 0) {
        throw Error("flattening failed; refine input mesh");
    }

    // Match the surface area, then centre at the area centroid.
    double area3 = 0.0, area2 = 0.0;
    Vec2 centroid;
    for (const Face& f : mesh.faces) {
        area3 += triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
        const double a = signed_area(flat.vertices[f[0]], flat.vertices[f[1]], flat.vertices[f[2]]);
        area2 += a;
        centroid += (flat.vertices[f[0]] + flat.vertices[f[1]] + flat.vertices[f[2]]) * (a / 3.0);
    }
    centroid = centroid / area2;
    const double s = std::sqrt(area3 / area2);
    for (Vec2& p : flat.vertices) p = (p - centroid) * s;

    out.edge_scale = conformal_factors(mesh, flat);
    out.distortion = quasi_conformal_distortion(mesh, flat);
    out.max_distortion = *std::max_element(out.distortion.begin(), out.distortion.end());
    out.mean_distortion = std::accumulate(out.distortion.begin(), out.distortion.end(), 0.0) /
                          static_cast<double>(out.distortion.size());
    return out;
}

EdgeScales conformal_factors(const TriangleMesh& mesh, const PlanarMesh& flat) {
    if (mesh.faces != flat.faces || mesh.vertices.size() != flat.vertices.size()) {
        throw Error("conformal factors need identical connectivity");
    }
    const EdgeAdjacency adj = build_edge_adjacency(mesh.faces, mesh.vertices.size());
    EdgeScales out;
    out.edges = adj.edges;
    out.scale.reserve(adj.edges.size());
    for (const Edge& e : adj.edges) {
        const double l3 = distance(mesh.vertices[e.a], mesh.vertices[e.b]);
        if (l3 == 0.0) throw Error("zero-length surface edge");
        out.scale.push_back(distance(flat.vertices[e.a], flat.vertices[e.b]) / l3);
    }
    return out;
}

std::vector<double> quasi_conformal_distortion(const TriangleMesh& mesh, const PlanarMesh& flat) {
    std::vector<double> out;
    out.reserve(mesh.faces.size());
    for (const Face& f : mesh.faces) {
        const Vec3 &a = mesh.vertices[f[0]], &b = mesh.vertices[f[1]], &c = mesh.vertices[f[2]];
        const Vec3 e1 = (b - a) / norm(b - a);
        const Vec3 nrm = cross(b - a, c - a);
        const Vec3 e2 = cross(nrm, e1) / norm(cross(nrm, e1));
        // Surface triangle in a local orthonormal frame.
        const double p00 = dot(b - a, e1), p01 = dot(c - a, e1);
        const double p10 = dot(b - a, e2), p11 = dot(c - a, e2);
        const Vec2 q1 = flat.vertices[f[1]] - flat.vertices[f[0]];
        const Vec2 q2 = flat.vertices[f[2]] - flat.vertices[f[0]];
        const double det = p00 * p11 - p01 * p10;
        // J = Q P^-1
        const double j00 = (q1.x * p11 - q2.x * p10) / det;
        const double j01 = (-q1.x * p01 + q2.x * p00) / det;
        const double j10 = (q1.y * p11 - q2.y * p10) / det;
        const double j11 = (-q1.y * p01 + q2.y * p00) / det;
        // Singular values of a 2x2 matrix.
        const double e = 0.5 * (j00 + j11), g = 0.5 * (j10 - j01);
        const double h = 0.5 * (j00 - j11), k = 0.5 * (j10 + j01);
        const double qn = std::hypot(e, g), rn = std::hypot(h, k);
        const double smax = qn + rn, smin = std::abs(qn - rn);
        out.push_back(smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity());
    }
    return out;
}

}  // namespace bubblemesh
