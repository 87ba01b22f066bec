#pragma once

#include <span>
#include <vector>

#include "bubblemesh/bubble.hpp"
#include "bubblemesh/mesh.hpp"

namespace bubblemesh {

/// Delaunay triangulation of a point set (incremental Bowyer-Watson with a
/// super-triangle). Output vertices are the input points in order; duplicate
/// points are left unreferenced. Throws when fewer than three non-collinear
/// points are given.
PlanarMesh delaunay_triangulate(std::span<const Vec2> points);

/// Constrained Delaunay triangulation of bubble centres. Consecutive boundary
/// bubbles of each loop (in list order, grouped by `loop`) become constrained
/// edges; loop 0 is the outer boundary and higher loops are holes. Triangles
/// whose centroid falls outside loop 0 or inside a hole are removed. Without
/// boundary bubbles this is the plain triangulation of the centres.
/// Output vertex i is bubble i.
PlanarMesh delaunay_triangulate(std::span<const Bubble> bubbles);

/// Boundary loops implied by boundary bubbles: indices grouped by loop, in
/// list order.
std::vector<std::vector<int>> bubble_boundary_loops(std::span<const Bubble> bubbles);

/// Drops vertices no face references. Returns old-index -> new-index (-1 if dropped).
std::vector<int> remove_unreferenced_vertices(PlanarMesh& mesh);

}  // namespace bubblemesh
