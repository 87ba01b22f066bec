#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bubblemesh/bubble.hpp"

namespace bubblemesh {

/// Shepard interpolation of anchor radii with weights 1/d^2. A query closer
/// than 1e-12 to an anchor centre returns that anchor's radius.
double interpolate_radius(const Vec2& point, std::span<const Bubble> anchors);

/// As above, then clamped from above by the domain's radius bound.
double interpolate_radius(const Vec2& point, std::span<const Bubble> anchors,
                          const PackingDomain& domain);

/// Bubbles along every loop of the domain (outer first, then holes), in loop
/// order. Polygon vertices always carry a bubble; each edge is split by
/// recursive bisection of arc length into intervals of about one local
/// diameter, and radii follow from the spacing so neighbours touch.
std::vector<Bubble> pack_boundary(const PackingDomain& domain);

struct InteriorPackingOptions {
    /// Candidate rejection near anchors and already-kept candidates. Unset:
    /// reject when the candidate centre lies inside the other bubble. Set:
    /// reject when the pairwise overlap ratio exceeds the value.
    std::optional<double> max_overlap;
    int max_depth = 18;
};

/// Diagonal-quadtree interior packing. Leaves carry a triangular lattice with
/// spacing equal to the local bubble diameter, anchored at the root corner so
/// uniform sizing yields one seamless lattice.
std::vector<Bubble> pack_interior_quadtree(const PackingDomain& domain,
                                           std::span<const Bubble> anchors,
                                           const InteriorPackingOptions& options = {});

}  // namespace bubblemesh
