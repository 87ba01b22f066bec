#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bubblemesh/geometry.hpp"

namespace bubblemesh {

using Face = std::array<int, 3>;

/// Indexed triangle mesh. `boundary_loop` lists the boundary vertices in the
/// order induced by face orientation. `param` optionally stores per-vertex
/// parametric coordinates (surfaces generated from an analytic map).
template <class Point>
struct BasicMesh {
    std::vector<Point> vertices;
    std::vector<Face> faces;
    std::vector<int> boundary_loop;
    std::vector<Vec2> param;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t face_count() const { return faces.size(); }
    bool has_param() const { return !param.empty() && param.size() == vertices.size(); }
};

using TriangleMesh = BasicMesh<Vec3>;
using PlanarMesh = BasicMesh<Vec2>;

/// Undirected edge with a < b.
struct Edge {
    int a = 0;
    int b = 0;
    auto operator<=>(const Edge&) const = default;
};

/// Edge to face incidence, built deterministically from face order.
struct EdgeAdjacency {
    std::vector<Edge> edges;                   // sorted
    std::vector<std::array<int, 2>> faces;     // per edge; second is -1 on the boundary
    std::vector<std::array<int, 3>> face_edges;  // per face, edge opposite each corner

    int find(int a, int b) const;  // -1 when absent
};

EdgeAdjacency build_edge_adjacency(std::span<const Face> faces, std::size_t vertex_count);

/// Vertex to incident-face lists.
std::vector<std::vector<int>> vertex_faces(std::span<const Face> faces, std::size_t vertex_count);

/// Vertex to neighbouring-vertex lists, each sorted ascending.
std::vector<std::vector<int>> vertex_neighbors(std::span<const Face> faces,
                                               std::size_t vertex_count);

/// All boundary loops, each oriented along the faces. Throws on boundary
/// vertices where the loops branch (non-manifold vertex).
std::vector<std::vector<int>> boundary_loops(std::span<const Face> faces,
                                             std::size_t vertex_count);

struct ValidationResult {
    bool ok = true;
    std::string message;
    explicit operator bool() const { return ok; }
};

ValidationResult validate_disk_topology(std::span<const Face> faces, std::size_t vertex_count);

template <class Point>
ValidationResult validate_disk_topology(const BasicMesh<Point>& mesh) {
    return validate_disk_topology(mesh.faces, mesh.vertices.size());
}

/// Recomputes `boundary_loop` from the faces. Leaves it empty unless the mesh
/// has exactly one boundary loop.
template <class Point>
void assign_boundary_loop(BasicMesh<Point>& mesh) {
    mesh.boundary_loop.clear();
    auto loops = boundary_loops(mesh.faces, mesh.vertices.size());
    if (loops.size() == 1) mesh.boundary_loop = std::move(loops.front());
}

// Per-face geometry --------------------------------------------------------

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c);
double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
inline double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return std::abs(signed_area(a, b, c));
}

/// Interior angles (radians) at the three corners.
std::array<double, 3> triangle_angles(const Vec3& a, const Vec3& b, const Vec3& c);
std::array<double, 3> triangle_angles(const Vec2& a, const Vec2& b, const Vec2& c);

template <class Point>
Box2 bounding_box_2d(const BasicMesh<Point>& mesh);

double bounding_diagonal(std::span<const Vec3> points);
double bounding_diagonal(std::span<const Vec2> points);

/// Area below which a face counts as degenerate.
template <class Point>
double degenerate_area_threshold(const BasicMesh<Point>& mesh) {
    const double d = bounding_diagonal(std::span<const Point>(mesh.vertices));
    return 1e-14 * d * d;
}

/// Index of the first degenerate face, or -1.
template <class Point>
int find_degenerate_face(const BasicMesh<Point>& mesh);

/// Shoelace area of a closed polygon given by vertex indices.
double polygon_area(std::span<const Vec2> points, std::span<const int> loop);
double polygon_area(std::span<const Vec2> polygon);

// Quality -------------------------------------------------------------------

struct MeshQualityReport {
    std::size_t triangle_count = 0;
    double min_angle = 0.0;  // degrees
    double max_angle = 0.0;  // degrees
    std::array<std::size_t, 4> min_angle_histogram{};  // [0,15) [15,30) [30,45) [45,60]

    /// Fraction of faces whose smallest angle is >= the given threshold (degrees).
    double fraction_at_least(double degrees_threshold) const;
    std::vector<double> face_min_angles;  // degrees, per face
};

int min_angle_bucket(double min_angle_deg);

MeshQualityReport quality_report(const TriangleMesh& mesh);
MeshQualityReport quality_report(const PlanarMesh& mesh);

/// Plain-text table with the columns of a quality report.
std::string format_quality_report(const MeshQualityReport& report, const std::string& label);

/// Longest edge length.
double max_edge_length(const TriangleMesh& mesh);
double max_edge_length(const PlanarMesh& mesh);

/// Flattened copy with z = 0 dropped / added.
PlanarMesh to_planar(const TriangleMesh& mesh);
TriangleMesh to_spatial(const PlanarMesh& mesh);

}  // namespace bubblemesh
