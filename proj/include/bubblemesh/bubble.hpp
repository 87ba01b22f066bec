#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bubblemesh/geometry.hpp"

namespace bubblemesh {

enum class BubbleKind : std::uint8_t {
    Boundary,        // fixed position and radius
    InteriorAnchor,  // moves, radius fixed, never removed by quantity control
    Mobile,
};

const char* to_string(BubbleKind kind);

/// A circle standing for a prospective mesh vertex; the radius is half the
/// intended local edge length.
struct Bubble {
    Vec2 center;
    double radius = 0.0;
    BubbleKind kind = BubbleKind::Mobile;
    int loop = -1;  // boundary loop index for Boundary bubbles (0 = outer)

    bool is_fixed() const { return kind == BubbleKind::Boundary; }
    bool is_anchor() const { return kind != BubbleKind::Mobile; }
};

/// Pairwise overlap ratio (r0 + ri - l) / min(r0, ri): zero at tangency,
/// negative when apart, 2 for concentric equal bubbles.
inline double overlap_pairwise(const Bubble& b0, const Bubble& bi) {
    const double l = distance(b0.center, bi.center);
    return (b0.radius + bi.radius - l) / std::min(b0.radius, bi.radius);
}

using Polygon = std::vector<Vec2>;

/// Planar region: a counterclockwise outer polygon and clockwise holes, plus
/// an optional radius bound. `r_min` / `r_max` bound the sizing where no
/// evaluator is given.
struct PackingDomain {
    Polygon outer;
    std::vector<Polygon> holes;
    std::function<double(const Vec2&)> sizing;
    double r_min = 0.0;
    double r_max = std::numeric_limits<double>::infinity();

    /// Radius bound at p (r_max when no evaluator is set).
    double radius_bound(const Vec2& p) const;

    Box2 bounding_box() const;

    /// Loops in order: outer first, then holes.
    std::vector<std::span<const Vec2>> loops() const;
};

/// Normalises loop orientation (outer CCW, holes CW) and checks that the
/// polygons are simple and holes lie inside the outer boundary.
PackingDomain make_domain(Polygon outer, std::vector<Polygon> holes = {});

/// Regular polygon approximating a circle, counterclockwise.
Polygon circle_polygon(const Vec2& center, double radius, int segments);

/// Circle polygonised so that consecutive vertices are one local bubble
/// diameter apart under `sizing` (falls back to `r` when sizing is empty).
Polygon circle_polygon_for_sizing(const Vec2& center, double radius,
                                  const std::function<double(const Vec2&)>& sizing, double r);

Polygon rectangle_polygon(const Vec2& lo, const Vec2& hi);

/// Crossing-number test (points on an edge count as outside).
bool point_in_polygon(const Vec2& p, std::span<const Vec2> polygon);
bool polygon_is_simple(std::span<const Vec2> polygon);

struct BoundaryPoint {
    Vec2 point;
    Vec2 inward_normal;
    double distance = 0.0;
};

/// Fast inside/outside queries and nearest-boundary projection for a domain.
/// Rows of a uniform grid keep the segments crossing them, so a horizontal
/// ray only meets a handful of segments.
class DomainIndex {
public:
    DomainIndex() = default;
    explicit DomainIndex(const PackingDomain& domain);

    bool contains(const Vec2& p) const;
    BoundaryPoint nearest_boundary(const Vec2& p) const;
    /// Distance from p to the closest boundary segment.
    double boundary_distance(const Vec2& p) const { return nearest_boundary(p).distance; }
    const Box2& box() const { return box_; }

private:
    struct Segment {
        Vec2 a, b;
    };
    std::vector<Segment> segments_;
    std::vector<std::vector<int>> rows_;
    Box2 box_;
    double row_height_ = 1.0;
};

}  // namespace bubblemesh
