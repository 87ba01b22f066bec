#pragma once

#include <span>
#include <vector>

#include "bubblemesh/bubble.hpp"
#include "bubblemesh/mesh.hpp"
#include "bubblemesh/relaxation.hpp"

namespace bubblemesh {

/// One fixed bubble per boundary vertex j with 2 r_j = (l_ij + l_jk) / 2,
/// in boundary-loop order.
std::vector<Bubble> reconstruct_boundary_bubbles(const PlanarMesh& flat);

/// Normalised inverse-length weights w_j = (1 / l_j) / sum_k (1 / l_k).
std::vector<double> reconstruction_weights(std::span<const double> lengths);

/// One interior-anchor bubble per interior vertex with r = 1/2 sum_j w_j l_j,
/// in vertex order.
std::vector<Bubble> reconstruct_interior_bubbles(const PlanarMesh& flat);

/// Boundary polygon of a flat mesh as a packing domain (no sizing bound).
PackingDomain flat_domain(const PlanarMesh& flat);

/// Largest pairwise overlap a gap-filling candidate may have with any anchor
/// or earlier candidate.
inline constexpr double kGapFillOverlap = 0.5;

/// Mobile bubbles packed into the gaps left between anchors.
std::vector<Bubble> fill_gaps(const PlanarMesh& flat, std::span<const Bubble> anchors,
                              double max_overlap = kGapFillOverlap);

struct RemeshOptions {
    double qc_threshold = 1.0;
    DynamicsParams dyn;
    ForceParams force;
    RelaxOptions relax;
    double fill_max_overlap = kGapFillOverlap;
};

struct RemeshResult {
    PlanarMesh mesh;  // vertex i = bubbles[i]
    std::vector<Bubble> bubbles;
    ConvergenceTrace trace;
    bool converged = false;
    int sweeps = 0;
    std::size_t reconstructed = 0;  // boundary + interior anchors
    std::size_t inserted = 0;       // gap-filling bubbles before QC
    std::size_t removed = 0;        // removed by boundary-region QC
};

/// Reconstruct, fill gaps, boundary-region QC, relax, triangulate.
RemeshResult remesh_planar(const PlanarMesh& flat, const RemeshOptions& options = {});

}  // namespace bubblemesh
