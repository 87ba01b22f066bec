#pragma once

#include <array>
#include <optional>
#include <vector>

#include "bubblemesh/mesh.hpp"

namespace bubblemesh {

/// Face of a planar mesh plus barycentric coordinates of a point in it.
struct BarycentricLocation {
    int face = -1;
    std::array<double, 3> lambda{};
};

/// Point location over a planar mesh via a uniform grid of face bounding
/// boxes. Among faces containing the point (exact orientation tests) the
/// lowest index wins; points within the snap tolerance (1e-9 x bounding-box
/// diagonal) of the mesh snap to the nearest face.
class PointLocator {
public:
    explicit PointLocator(const PlanarMesh& mesh);

    /// Throws "outside flattened domain" when the point cannot be located.
    BarycentricLocation locate(const Vec2& p) const;
    std::optional<BarycentricLocation> try_locate(const Vec2& p) const;

    double snap_tolerance() const { return snap_; }

private:
    const PlanarMesh* mesh_;
    Box2 box_;
    double cell_ = 1.0;
    int nx_ = 1, ny_ = 1;
    double snap_ = 0.0;
    std::vector<std::vector<int>> cells_;
};

/// Barycentric coordinates of p with respect to (a, b, c), clamped to the
/// simplex and renormalised.
std::array<double, 3> barycentric(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c);

BarycentricLocation locate(const PlanarMesh& mesh, const Vec2& p);

/// Lifts every vertex of `new_flat` onto `initial_surface` through the
/// piecewise-linear correspondence with `initial_flat`. Parameter values are
/// carried along when the initial surface has them.
TriangleMesh inverse_map(const PlanarMesh& new_flat, const PlanarMesh& initial_flat,
                         const TriangleMesh& initial_surface);

}  // namespace bubblemesh
