#include "bubblemesh/packing.hpp"

#include <algorithm>
#include <cmath>

#include "bubblemesh/log.hpp"
#include "bubblemesh/spatial_grid.hpp"

namespace bubblemesh {

namespace {

constexpr double kCoincident = 1e-12;

/// Anchor radii in structure-of-arrays form for repeated Shepard queries.
class AnchorField {
public:
    explicit AnchorField(std::span<const Bubble> anchors) {
        xs_.reserve(anchors.size());
        ys_.reserve(anchors.size());
        rs_.reserve(anchors.size());
        for (const Bubble& b : anchors) {
            xs_.push_back(b.center.x);
            ys_.push_back(b.center.y);
            rs_.push_back(b.radius);
        }
    }

    double operator()(const Vec2& p) const {
        if (rs_.empty()) throw Error("radius interpolation needs at least one anchor");
        double wsum = 0.0, rsum = 0.0;
        for (std::size_t i = 0; i < rs_.size(); ++i) {
            const double dx = p.x - xs_[i], dy = p.y - ys_[i];
            const double d2 = dx * dx + dy * dy;
            if (d2 < kCoincident * kCoincident) return rs_[i];
            const double w = 1.0 / d2;
            wsum += w;
            rsum += w * rs_[i];
        }
        return rsum / wsum;
    }

private:
    std::vector<double> xs_, ys_, rs_;
};

struct ArcSample {
    double s;    // arc length from the edge start
    double phi;  // cumulative number of local diameters
};

// Integrates 1 / (2 r(s)) along the segment by recursive bisection. An
// interval is split while it spans more than a quarter diameter or while the
// trapezoid and midpoint estimates disagree.
void subdivide(const PackingDomain& domain, const Vec2& a, const Vec2& dir, double s0, double s1,
               double f0, double f1, int depth, std::vector<ArcSample>& out) {
    const double sm = 0.5 * (s0 + s1);
    const double fm = 1.0 / (2.0 * domain.radius_bound(a + dir * sm));
    const double trap = 0.5 * (f0 + f1) * (s1 - s0);
    const double simpson = (f0 + 4.0 * fm + f1) * (s1 - s0) / 6.0;
    const bool split = depth < 30 && (simpson > 0.25 || std::abs(trap - simpson) > 1e-4 * std::max(simpson, 1e-300));
    if (split) {
        subdivide(domain, a, dir, s0, sm, f0, fm, depth + 1, out);
        subdivide(domain, a, dir, sm, s1, fm, f1, depth + 1, out);
        return;
    }
    out.push_back({s1, out.back().phi + simpson});
}

// Arc-length positions (excluding the end corner) of bubbles along one edge.
std::vector<double> edge_positions(const PackingDomain& domain, const Vec2& a, const Vec2& b) {
    const double L = distance(a, b);
    const Vec2 dir = (b - a) / L;
    std::vector<ArcSample> table{{0.0, 0.0}};
    const double fa = 1.0 / (2.0 * domain.radius_bound(a));
    const double fb = 1.0 / (2.0 * domain.radius_bound(b));
    subdivide(domain, a, dir, 0.0, L, fa, fb, 0, table);

    const double total = table.back().phi;
    const int n = std::max(1, static_cast<int>(std::round(total)));
    std::vector<double> pos{0.0};
    for (int k = 1; k < n; ++k) {
        const double target = total * k / n;
        // Binary search of the cumulative table, then linear interpolation.
        auto it = std::lower_bound(table.begin(), table.end(), target,
                                   [](const ArcSample& s, double t) { return s.phi < t; });
        const std::size_t i = std::max<std::size_t>(1, static_cast<std::size_t>(it - table.begin()));
        const ArcSample& lo = table[i - 1];
        const ArcSample& hi = table[std::min(i, table.size() - 1)];
        const double f = (target - lo.phi) / std::max(hi.phi - lo.phi, 1e-300);
        pos.push_back(lo.s + std::clamp(f, 0.0, 1.0) * (hi.s - lo.s));
    }
    return pos;
}

bool rejected(const Bubble& cand, const Bubble& other, const std::optional<double>& max_overlap) {
    if (max_overlap) return overlap_pairwise(other, cand) > *max_overlap;
    return distance(cand.center, other.center) < other.radius;
}

}  // namespace

double interpolate_radius(const Vec2& point, std::span<const Bubble> anchors) {
    return AnchorField(anchors)(point);
}

double interpolate_radius(const Vec2& point, std::span<const Bubble> anchors,
                          const PackingDomain& domain) {
    return std::min(interpolate_radius(point, anchors), domain.radius_bound(point));
}

std::vector<Bubble> pack_boundary(const PackingDomain& domain) {
    std::vector<Bubble> out;
    int loop_index = 0;
    for (auto loop : domain.loops()) {
        double perimeter = 0.0;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            perimeter += distance(loop[i], loop[(i + 1) % loop.size()]);
        }
        if (perimeter < 2.0 * domain.r_min) throw Error("boundary too small for sizing");

        std::vector<Vec2> centers;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Vec2& a = loop[i];
            const Vec2& b = loop[(i + 1) % loop.size()];
            if (distance(a, b) <= 0.0) continue;
            const Vec2 dir = (b - a) / distance(a, b);
            for (double s : edge_positions(domain, a, b)) centers.push_back(a + dir * s);
        }
        const std::size_t n = centers.size();
        for (std::size_t k = 0; k < n; ++k) {
            const double prev = distance(centers[(k + n - 1) % n], centers[k]);
            const double next = distance(centers[k], centers[(k + 1) % n]);
            Bubble b;
            b.center = centers[k];
            b.radius = 0.25 * (prev + next);
            b.kind = BubbleKind::Boundary;
            b.loop = loop_index;
            out.push_back(b);
        }
        ++loop_index;
    }
    return out;
}

std::vector<Bubble> pack_interior_quadtree(const PackingDomain& domain,
                                           std::span<const Bubble> anchors,
                                           const InteriorPackingOptions& options) {
    std::vector<Bubble> kept;
    if (anchors.empty()) throw Error("interior packing needs at least one anchor");

    const DomainIndex index(domain);
    const AnchorField field(anchors);
    auto local_radius = [&](const Vec2& p) { return std::min(field(p), domain.radius_bound(p)); };

    Box2 box = domain.bounding_box();
    const double side = std::max(box.width(), box.height());
    const Vec2 origin = box.lo;

    double max_anchor_r = 0.0;
    for (const Bubble& a : anchors) max_anchor_r = std::max(max_anchor_r, a.radius);
    SpatialGrid anchor_grid(box, std::max(2.0 * max_anchor_r, side * 1e-6));
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        anchor_grid.insert(static_cast<int>(i), anchors[i].center);
    }
    SpatialGrid kept_grid(box, std::max(2.0 * max_anchor_r, side * 1e-6));
    double max_kept_r = 0.0;

    auto consider = [&](const Vec2& p) {
        if (!index.contains(p)) return;
        Bubble cand;
        cand.center = p;
        cand.radius = local_radius(p);
        cand.kind = BubbleKind::Mobile;
        bool reject = false;
        const double reach_a = max_anchor_r + 2.0 * cand.radius;
        anchor_grid.visit(p, reach_a, [&](int id) {
            if (!reject && rejected(cand, anchors[id], options.max_overlap)) reject = true;
        });
        if (reject) return;
        kept_grid.visit(p, max_kept_r + 2.0 * cand.radius, [&](int id) {
            if (!reject && rejected(cand, kept[id], options.max_overlap)) reject = true;
        });
        if (reject) return;
        kept_grid.insert(static_cast<int>(kept.size()), p);
        max_kept_r = std::max(max_kept_r, cand.radius);
        kept.push_back(cand);
    };

    // Lattice spacings are quantised to steps of 2^(1/8) below a base radius,
    // so leaves of nearly equal size share one lattice.
    const double base_r = std::isfinite(domain.r_max) ? domain.r_max : max_anchor_r;
    const double step = std::pow(2.0, 1.0 / 8.0);
    auto lattice_radius = [&](double r) {
        if (!(r > 0.0)) return base_r;
        const double k = std::round(std::log(base_r / r) / std::log(step));
        return base_r * std::pow(step, -k);
    };

    const double row_factor = std::sqrt(3.0) / 2.0;
    auto emit_leaf = [&](const Vec2& lo, double s, double r) {
        const double h = 2.0 * lattice_radius(r);
        const double dy = h * row_factor;
        const long j0 = static_cast<long>(std::ceil((lo.y - origin.y) / dy));
        const long j1 = static_cast<long>(std::ceil((lo.y + s - origin.y) / dy));
        for (long j = j0; j < j1; ++j) {
            const double y = origin.y + j * dy;
            const double shift = (j % 2 != 0) ? 0.5 * h : 0.0;
            const long i0 = static_cast<long>(std::ceil((lo.x - origin.x - shift) / h));
            const long i1 = static_cast<long>(std::ceil((lo.x + s - origin.x - shift) / h));
            for (long i = i0; i < i1; ++i) consider({origin.x + shift + i * h, y});
        }
    };

    // Depth-first traversal in a fixed child order (SW, SE, NW, NE).
    struct Cell {
        Vec2 lo;
        double size;
        int depth;
    };
    std::vector<Cell> stack{{origin, side, 0}};
    const Box2& dbox = index.box();
    while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        if (c.lo.x > dbox.hi.x || c.lo.y > dbox.hi.y || c.lo.x + c.size < dbox.lo.x ||
            c.lo.y + c.size < dbox.lo.y) {
            continue;
        }
        const Vec2 center = c.lo + Vec2{0.5 * c.size, 0.5 * c.size};
        const double r = local_radius(center);
        const double diag = c.size * std::sqrt(2.0);
        if (diag > 4.0 * r && c.depth < options.max_depth) {
            const double h = 0.5 * c.size;
            stack.push_back({c.lo + Vec2{h, h}, h, c.depth + 1});
            stack.push_back({c.lo + Vec2{0, h}, h, c.depth + 1});
            stack.push_back({c.lo + Vec2{h, 0}, h, c.depth + 1});
            stack.push_back({c.lo, h, c.depth + 1});
            continue;
        }
        emit_leaf(c.lo, c.size, r);
    }

    const bool has_interior = std::any_of(anchors.begin(), anchors.end(), [](const Bubble& b) { return !b.is_fixed(); });
    if (kept.empty() && !has_interior) log_warning("interior packing produced no bubbles (domain too thin?)");
    return kept;
}

}  // namespace bubblemesh
