#include "bubblemesh/remesh.hpp"

#include <algorithm>

#include "bubblemesh/delaunay.hpp"
#include "bubblemesh/packing.hpp"

namespace bubblemesh {

namespace {

const std::vector<int>& require_loop(const PlanarMesh& flat) {
    if (flat.boundary_loop.size() < 3) throw Error("flat mesh needs a boundary loop of at least 3 vertices");
    return flat.boundary_loop;
}

}  // namespace

std::vector<Bubble> reconstruct_boundary_bubbles(const PlanarMesh& flat) {
    const auto& loop = require_loop(flat);
    const std::size_t n = loop.size();
    std::vector<Bubble> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2& prev = flat.vertices[loop[(k + n - 1) % n]];
        const Vec2& cur = flat.vertices[loop[k]];
        const Vec2& next = flat.vertices[loop[(k + 1) % n]];
        const double lij = distance(prev, cur), ljk = distance(cur, next);
        if (lij == 0.0 || ljk == 0.0) throw Error("zero-length boundary edge");
        Bubble b;
        b.center = cur;
        b.radius = 0.25 * (lij + ljk);
        b.kind = BubbleKind::Boundary;
        b.loop = 0;
        out.push_back(b);
    }
    return out;
}

std::vector<double> reconstruction_weights(std::span<const double> lengths) {
    double sum = 0.0;
    for (double l : lengths) {
        if (!(l > 0.0)) throw Error("reconstruction needs positive edge lengths");
        sum += 1.0 / l;
    }
    std::vector<double> w;
    w.reserve(lengths.size());
    for (double l : lengths) w.push_back((1.0 / l) / sum);
    return w;
}

std::vector<Bubble> reconstruct_interior_bubbles(const PlanarMesh& flat) {
    std::vector<char> on_boundary(flat.vertices.size(), 0);
    for (int v : flat.boundary_loop) on_boundary[v] = 1;
    const auto nbrs = vertex_neighbors(flat.faces, flat.vertices.size());
    std::vector<Bubble> out;
    std::vector<double> lengths;
    for (std::size_t v = 0; v < flat.vertices.size(); ++v) {
        if (on_boundary[v]) continue;
        if (nbrs[v].empty()) throw Error("isolated vertex " + std::to_string(v));
        lengths.clear();
        for (int u : nbrs[v]) lengths.push_back(distance(flat.vertices[v], flat.vertices[u]));
        const auto w = reconstruction_weights(lengths);
        double r = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) r += w[j] * lengths[j];
        Bubble b;
        b.center = flat.vertices[v];
        b.radius = 0.5 * r;
        b.kind = BubbleKind::InteriorAnchor;
        out.push_back(b);
    }
    return out;
}

PackingDomain flat_domain(const PlanarMesh& flat) {
    const auto& loop = require_loop(flat);
    PackingDomain d;
    for (int v : loop) d.outer.push_back(flat.vertices[v]);
    if (polygon_area(d.outer) < 0.0) std::reverse(d.outer.begin(), d.outer.end());
    return d;
}

std::vector<Bubble> fill_gaps(const PlanarMesh& flat, std::span<const Bubble> anchors,
                              double max_overlap) {
    const PackingDomain domain = flat_domain(flat);
    InteriorPackingOptions opt;
    opt.max_overlap = max_overlap;
    return pack_interior_quadtree(domain, anchors, opt);
}

RemeshResult remesh_planar(const PlanarMesh& flat, const RemeshOptions& options) {
    RemeshResult result;
    std::vector<Bubble> bubbles = reconstruct_boundary_bubbles(flat);
    const auto interior = reconstruct_interior_bubbles(flat);
    bubbles.insert(bubbles.end(), interior.begin(), interior.end());
    result.reconstructed = bubbles.size();

    const auto gaps = fill_gaps(flat, bubbles, options.fill_max_overlap);
    result.inserted = gaps.size();
    bubbles.insert(bubbles.end(), gaps.begin(), gaps.end());
    result.removed = qc_boundary_region(bubbles, options.qc_threshold);

    // Quantity control already ran; relax only.
    QcConfig qc;
    qc.strategy = QcStrategy::New;
    qc.threshold = options.qc_threshold;
    const PackingDomain domain = flat_domain(flat);
    RelaxResult relaxed = relax_until_converged(std::move(bubbles), domain, options.dyn,
                                                options.force, qc, options.relax);
    result.trace = std::move(relaxed.trace);
    result.converged = relaxed.converged;
    result.sweeps = relaxed.sweeps;
    result.bubbles = std::move(relaxed.bubbles);
    result.mesh = delaunay_triangulate(std::span<const Bubble>(result.bubbles));
    return result;
}

}  // namespace bubblemesh
