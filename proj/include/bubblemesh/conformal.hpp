#pragma once

#include <vector>

#include "bubblemesh/mesh.hpp"

namespace bubblemesh {

/// Ratio of flat to surface length for every edge (edges sorted, a < b).
struct EdgeScales {
    std::vector<Edge> edges;
    std::vector<double> scale;
};

struct FlattenResult {
    PlanarMesh flat;  // same faces and vertex order as the input
    EdgeScales edge_scale;
    std::vector<double> distortion;  // per face, sigma_max / sigma_min >= 1
    double mean_distortion = 1.0;
    double max_distortion = 1.0;
};

/// Free-boundary discrete conformal flattening of a disk-topology mesh
/// (least-squares conformal energy, two boundary vertices pinned), scaled to
/// the surface area and centred at the origin.
FlattenResult flatten(const TriangleMesh& mesh);

EdgeScales conformal_factors(const TriangleMesh& mesh, const PlanarMesh& flat);

/// Per-face ratio of the singular values of the affine map surface -> plane.
std::vector<double> quasi_conformal_distortion(const TriangleMesh& mesh, const PlanarMesh& flat);

}  // namespace bubblemesh
