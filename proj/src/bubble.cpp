#include "bubblemesh/bubble.hpp"

#include <algorithm>
#include <cmath>

#include "bubblemesh/mesh.hpp"
#include "bubblemesh/predicates.hpp"

namespace bubblemesh {

const char* to_string(BubbleKind kind) {
    switch (kind) {
        case BubbleKind::Boundary: return "boundary";
        case BubbleKind::InteriorAnchor: return "interior-anchor";
        case BubbleKind::Mobile: return "mobile";
    }
    return "unknown";
}

double PackingDomain::radius_bound(const Vec2& p) const {
    if (!sizing) return r_max;
    return std::min(sizing(p), r_max);
}

Box2 PackingDomain::bounding_box() const {
    Box2 box;
    for (const Vec2& p : outer) box.extend(p);
    return box;
}

std::vector<std::span<const Vec2>> PackingDomain::loops() const {
    std::vector<std::span<const Vec2>> out;
    out.emplace_back(outer);
    for (const auto& h : holes) out.emplace_back(h);
    return out;
}

namespace {

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    using predicates::orient2d;
    const int o1 = orient2d(a, b, c), o2 = orient2d(a, b, d);
    const int o3 = orient2d(c, d, a), o4 = orient2d(c, d, b);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    auto on_segment = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
               std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
    };
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

Vec2 closest_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double len2 = norm2(d);
    if (len2 <= 0.0) return a;
    const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    return a + d * t;
}

}  // namespace

bool polygon_is_simple(std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        if (a == b) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            // Adjacent edges share a vertex; skip them.
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_cross(a, b, poly[j], poly[(j + 1) % n])) return false;
        }
    }
    return true;
}

bool point_in_polygon(const Vec2& p, std::span<const Vec2> poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[j];
        const Vec2& b = poly[i];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

PackingDomain make_domain(Polygon outer, std::vector<Polygon> holes) {
    if (!polygon_is_simple(outer)) throw Error("outer boundary is not a simple polygon");
    if (polygon_area(outer) < 0.0) std::reverse(outer.begin(), outer.end());
    for (auto& h : holes) {
        if (!polygon_is_simple(h)) throw Error("hole boundary is not a simple polygon");
        if (polygon_area(h) > 0.0) std::reverse(h.begin(), h.end());
        for (const Vec2& p : h) {
            if (!point_in_polygon(p, outer)) throw Error("hole is not inside the outer boundary");
        }
    }
    PackingDomain d;
    d.outer = std::move(outer);
    d.holes = std::move(holes);
    return d;
}

Polygon circle_polygon(const Vec2& center, double radius, int segments) {
    Polygon poly;
    poly.reserve(segments);
    for (int i = 0; i < segments; ++i) {
        const double t = 2.0 * kPi * i / segments;
        poly.push_back(center + Vec2{std::cos(t), std::sin(t)} * radius);
    }
    return poly;
}

Polygon circle_polygon_for_sizing(const Vec2& center, double radius,
                                  const std::function<double(const Vec2&)>& sizing, double r) {
    auto local_r = [&](double t) {
        const Vec2 p = center + Vec2{std::cos(t), std::sin(t)} * radius;
        return sizing ? std::min(sizing(p), r) : r;
    };
    // Cumulative count of diameters along the circle, sampled finely.
    const int samples = 720;
    std::vector<double> cum(samples + 1, 0.0);
    const double dt = 2.0 * kPi / samples;
    for (int i = 0; i < samples; ++i) {
        const double t = (i + 0.5) * dt;
        cum[i + 1] = cum[i] + radius * dt / (2.0 * local_r(t));
    }
    const int n = std::max(3, static_cast<int>(std::lround(cum.back())));
    Polygon poly;
    poly.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double target = cum.back() * k / n;
        const auto it = std::lower_bound(cum.begin(), cum.end(), target);
        const int i = std::max(1, static_cast<int>(it - cum.begin()));
        const double f = (target - cum[i - 1]) / std::max(cum[i] - cum[i - 1], 1e-300);
        const double t = (i - 1 + std::clamp(f, 0.0, 1.0)) * dt;
        poly.push_back(center + Vec2{std::cos(t), std::sin(t)} * radius);
    }
    return poly;
}

Polygon rectangle_polygon(const Vec2& lo, const Vec2& hi) {
    return {{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}};
}

DomainIndex::DomainIndex(const PackingDomain& domain) {
    for (auto loop : domain.loops()) {
        for (std::size_t i = 0; i < loop.size(); ++i) {
            segments_.push_back({loop[i], loop[(i + 1) % loop.size()]});
            box_.extend(loop[i]);
        }
    }
    const int nrows = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(segments_.size()))) * 2);
    row_height_ = std::max(box_.height() / nrows, 1e-300);
    rows_.assign(nrows, {});
    for (std::size_t s = 0; s < segments_.size(); ++s) {
        const double y0 = std::min(segments_[s].a.y, segments_[s].b.y);
        const double y1 = std::max(segments_[s].a.y, segments_[s].b.y);
        const int r0 = std::clamp(static_cast<int>((y0 - box_.lo.y) / row_height_), 0, nrows - 1);
        const int r1 = std::clamp(static_cast<int>((y1 - box_.lo.y) / row_height_), 0, nrows - 1);
        for (int r = r0; r <= r1; ++r) rows_[r].push_back(static_cast<int>(s));
    }
}

bool DomainIndex::contains(const Vec2& p) const {
    if (segments_.empty() || p.x < box_.lo.x || p.x > box_.hi.x || p.y < box_.lo.y ||
        p.y > box_.hi.y) {
        return false;
    }
    const int nrows = static_cast<int>(rows_.size());
    const int r = std::clamp(static_cast<int>((p.y - box_.lo.y) / row_height_), 0, nrows - 1);
    bool inside = false;
    for (int s : rows_[r]) {
        const Vec2& a = segments_[s].a;
        const Vec2& b = segments_[s].b;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

BoundaryPoint DomainIndex::nearest_boundary(const Vec2& p) const {
    BoundaryPoint best;
    best.distance = std::numeric_limits<double>::infinity();
    for (const auto& s : segments_) {
        const Vec2 q = closest_on_segment(p, s.a, s.b);
        const double d = distance(p, q);
        if (d < best.distance) {
            best.distance = d;
            best.point = q;
            const Vec2 t = s.b - s.a;
            best.inward_normal = perp(t) / std::max(norm(t), 1e-300);
        }
    }
    return best;
}

}  // namespace bubblemesh
