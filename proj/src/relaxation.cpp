#include "bubblemesh/relaxation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "bubblemesh/delaunay.hpp"
#include "bubblemesh/mesh.hpp"

namespace bubblemesh {

namespace {

constexpr double kCoincident = 1e-12;
// Neighbour reach of the summed overlap, 2 r0 widened by a relative 1e-9 so
// exactly tangent lattice neighbours survive rounding.
constexpr double kNeighborReach = 2.0 * (1.0 + 1e-9);

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Box2 bubble_box(std::span<const Bubble> bubbles) {
    Box2 box;
    for (const Bubble& b : bubbles) box.extend(b.center);
    return box;
}

double mean_diameter(std::span<const BubbleState> states) {
    if (states.empty()) return 0.0;
    double s = 0.0;
    for (const BubbleState& st : states) s += 2.0 * st.bubble.radius;
    return s / static_cast<double>(states.size());
}

}  // namespace

void ForceParams::validate() const {
    if (!(k > 0.0)) throw Error("force stiffness k must be positive");
    if (!(f0 > 0.0)) throw Error("force f0 must be positive");
    if (!(cutoff_factor > 1.0)) throw Error("cutoff_factor must exceed 1");
    // The linear factor a w + b must stay positive on [0, cutoff].
    const double b = f0 / cutoff_factor;
    const double a = k / (cutoff_factor - 1.0) - b;
    if (!(a * cutoff_factor + b > 0.0)) throw Error("force law changes sign inside the cutoff; lower f0");
}

void DynamicsParams::validate() const {
    if (!(m > 0.0)) throw Error("mass must be positive");
    if (!(c > 0.0)) throw Error("damping must be positive");
    if (!(dt > 0.0)) throw Error("time step must be positive");
    if (!(force_tol > 0.0)) throw Error("force_tol must be positive");
    if (max_sweeps < 1) throw Error("max_sweeps must be at least 1");
    if (stall_window < 1) throw Error("stall_window must be at least 1");
}

DynamicsParams DynamicsParams::for_stiffness(double k, double m) {
    DynamicsParams d;
    d.m = m;
    d.c = 1.4 * std::sqrt(m * k);
    d.dt = 0.2 * std::sqrt(m / k);
    return d;
}

double force_magnitude(double w, double l0, const ForceParams& p) {
    if (w >= p.cutoff_factor) return 0.0;
    const double b = p.f0 * l0 / p.cutoff_factor;
    const double a = p.k * l0 / (p.cutoff_factor - 1.0) - b;
    return (w - 1.0) * (w - p.cutoff_factor) * (a * w + b);
}

Vec2 pair_force(const Bubble& bi, const Bubble& bj, const ForceParams& params, std::size_t i,
                std::size_t j) {
    const double l0 = bi.radius + bj.radius;
    const Vec2 d = bi.center - bj.center;
    const double l = norm(d);
    if (l < kCoincident) {
        const std::uint64_t lo = std::min(i, j), hi = std::max(i, j);
        const std::uint64_t h = splitmix64(splitmix64(lo ^ (params.seed * 0x2545f4914f6cdd1dULL)) ^ hi);
        const double theta = 2.0 * kPi * static_cast<double>(h >> 11) * 0x1.0p-53;
        const Vec2 u{std::cos(theta), std::sin(theta)};
        const double f = force_magnitude(0.0, l0, params);
        return i < j ? u * f : u * -f;
    }
    const double f = force_magnitude(l / l0, l0, params);
    if (f == 0.0) return {};
    return d * (f / l);
}

std::vector<BubbleState> make_states(std::span<const Bubble> bubbles) {
    std::vector<BubbleState> s;
    s.reserve(bubbles.size());
    for (const Bubble& b : bubbles) s.push_back({b, {}});
    return s;
}

std::vector<Bubble> bubbles_of(std::span<const BubbleState> states) {
    std::vector<Bubble> b;
    b.reserve(states.size());
    for (const BubbleState& s : states) b.push_back(s.bubble);
    return b;
}

void NeighborIndex::rebuild_impl(std::size_t n, const std::function<const Bubble&(std::size_t)>& at) {
    Box2 box;
    max_radius_ = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        box.extend(at(i).center);
        max_radius_ = std::max(max_radius_, at(i).radius);
    }
    if (n == 0) box.extend({0.0, 0.0});
    grid_.reset(box, max_radius_ > 0.0 ? 2.0 * max_radius_ : 1.0);
    for (std::size_t i = 0; i < n; ++i) grid_.insert(static_cast<int>(i), at(i).center);
}

void NeighborIndex::rebuild(std::span<const BubbleState> states) {
    rebuild_impl(states.size(), [&](std::size_t i) -> const Bubble& { return states[i].bubble; });
}

void NeighborIndex::rebuild(std::span<const Bubble> bubbles) {
    rebuild_impl(bubbles.size(), [&](std::size_t i) -> const Bubble& { return bubbles[i]; });
}

namespace {

// Candidate neighbours of bubble i for one RK4 step; the margin covers motion
// since the grid was built.
void gather(std::span<const BubbleState> states, std::size_t i, const ForceParams& force,
            const NeighborIndex& index, std::vector<int>& out) {
    out.clear();
    const Bubble& b = states[i].bubble;
    const double reach = force.cutoff_factor * (b.radius + index.max_radius()) + index.max_radius();
    index.visit(b.center, reach, [&](int j) {
        if (static_cast<std::size_t>(j) != i) out.push_back(j);
    });
    std::sort(out.begin(), out.end());
}

Vec2 force_at(std::span<const BubbleState> states, std::size_t i, const Vec2& x,
              std::span<const int> neighbors, const ForceParams& force) {
    Bubble probe = states[i].bubble;
    probe.center = x;
    Vec2 f;
    for (int j : neighbors) f += pair_force(probe, states[j].bubble, force, i, j);
    return f;
}

// Repulsion from a mirror image of the bubble across the nearest boundary
// point; keeps mobile bubbles from leaking through gaps between boundary
// bubbles. Zero once the bubble is a radius away from the boundary.
Vec2 wall_force(const DomainIndex& domain, const Vec2& x, double r, const ForceParams& force) {
    const BoundaryPoint q = domain.nearest_boundary(x);
    if (q.distance >= r) return {};
    const bool inside = domain.contains(x);
    const Vec2 away = x - q.point;
    const Vec2 dir = inside && q.distance > 0.0 ? away / q.distance : q.inward_normal;
    const double w = inside ? q.distance / r : 0.0;
    return dir * force_magnitude(w, 2.0 * r, force);
}

}  // namespace

Vec2 net_force(std::span<const BubbleState> states, std::size_t i, const ForceParams& force,
               const NeighborIndex& index) {
    std::vector<int> nb;
    gather(states, i, force, index, nb);
    return force_at(states, i, states[i].bubble.center, nb, force);
}

SweepStats relax_step(std::vector<BubbleState>& states, const DynamicsParams& dyn,
                      const ForceParams& force, const NeighborIndex& index,
                      const DomainIndex* domain, const ExternalForce& external) {
    SweepStats stats;
    std::vector<int> nb, near;
    const double m = dyn.m, c = dyn.c, h = dyn.dt;
    for (std::size_t i = 0; i < states.size(); ++i) {
        BubbleState& s = states[i];
        if (s.bubble.is_fixed()) continue;
        gather(states, i, force, index, nb);
        // Pairs beyond the cutoff give exactly zero force, so the short list
        // is exact while the trial position stays within `margin` of x0.
        const double margin = 0.5 * s.bubble.radius;
        near.clear();
        for (int j : nb) {
            const Bubble& bj = states[j].bubble;
            if (distance(s.bubble.center, bj.center) < force.cutoff_factor * (s.bubble.radius + bj.radius) + margin) {
                near.push_back(j);
            }
        }
        const bool near_wall = domain && domain->boundary_distance(s.bubble.center) < s.bubble.radius + margin;
        auto accel = [&](const Vec2& x, const Vec2& v, double* fmag) {
            const bool close = distance(x, s.bubble.center) < margin;
            Vec2 f = force_at(states, i, x, close ? near : nb, force);
            if (domain && (near_wall || !close)) f += wall_force(*domain, x, s.bubble.radius, force);
            if (external) f += external(i, x);
            if (fmag) *fmag = norm(f);
            return (f - v * c) / m;
        };
        const Vec2 x0 = s.bubble.center, v0 = s.velocity;
        double f1 = 0.0;
        const Vec2 k1x = v0, k1v = accel(x0, v0, &f1);
        const Vec2 k2x = v0 + k1v * (0.5 * h), k2v = accel(x0 + k1x * (0.5 * h), k2x, nullptr);
        const Vec2 k3x = v0 + k2v * (0.5 * h), k3v = accel(x0 + k2x * (0.5 * h), k3x, nullptr);
        const Vec2 k4x = v0 + k3v * h, k4v = accel(x0 + k3x * h, k4x, nullptr);
        Vec2 x = x0 + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        Vec2 v = v0 + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
        if (!std::isfinite(x.x) || !std::isfinite(x.y) || !std::isfinite(v.x) || !std::isfinite(v.y)) {
            throw Error("dynamics diverged; reduce dt");
        }
        stats.max_force = std::max(stats.max_force, f1);

        if (domain && !domain->contains(x)) {
            const BoundaryPoint q = domain->nearest_boundary(x);
            Vec2 inward = q.point - x;
            const double len = norm(inward);
            inward = len > 0.0 ? inward / len : q.inward_normal;
            Vec2 y = q.point + inward * s.bubble.radius;
            if (!domain->contains(y)) y = q.point + q.inward_normal * (1e-3 * s.bubble.radius);
            if (!domain->contains(y)) y = x0;
            x = y;
            v = {};
            ++stats.projected;
        }
        s.bubble.center = x;
        s.velocity = v;
    }
    return stats;
}

double overlap_original(std::size_t i, std::span<const Bubble> bubbles, const NeighborIndex& index) {
    const Bubble& b0 = bubbles[i];
    const double r0 = b0.radius;
    double sum = 0.0;
    std::vector<int> nb;
    index.visit(b0.center, kNeighborReach * r0, [&](int j) { nb.push_back(j); });
    std::sort(nb.begin(), nb.end());
    for (int j : nb) {
        if (static_cast<std::size_t>(j) == i) continue;
        const double l = distance(b0.center, bubbles[j].center);
        if (l <= kNeighborReach * r0) sum += (2.0 * r0 + bubbles[j].radius - l) / r0;
    }
    return sum;
}

QcOriginalResult qc_original(std::vector<Bubble>& bubbles, double low, double high,
                             const RadiusProvider& new_radius, const DomainIndex* domain) {
    if (!(low < high)) throw Error("quantity control needs low < high");
    QcOriginalResult result;
    if (bubbles.empty()) return result;

    Box2 box = bubble_box(bubbles);
    double max_r = 0.0;
    for (const Bubble& b : bubbles) max_r = std::max(max_r, b.radius);
    SpatialGrid grid(box, 2.0 * max_r);
    for (std::size_t i = 0; i < bubbles.size(); ++i) grid.insert(static_cast<int>(i), bubbles[i].center);
    std::vector<char> deleted(bubbles.size(), 0);

    const std::size_t n = bubbles.size();
    std::vector<int> nb;
    for (std::size_t i = 0; i < n; ++i) {
        if (bubbles[i].kind != BubbleKind::Mobile || deleted[i]) continue;
        const Bubble b0 = bubbles[i];
        const double r0 = b0.radius;
        nb.clear();
        grid.visit(b0.center, kNeighborReach * r0, [&](int j) { nb.push_back(j); });
        std::sort(nb.begin(), nb.end());
        double sum = 0.0;
        std::vector<double> angles;
        for (int j : nb) {
            if (static_cast<std::size_t>(j) == i || deleted[j]) continue;
            const Vec2 d = bubbles[j].center - b0.center;
            const double l = norm(d);
            if (l > kNeighborReach * r0) continue;
            sum += (2.0 * r0 + bubbles[j].radius - l) / r0;
            angles.push_back(std::atan2(d.y, d.x));
        }
        if (sum > high) {
            deleted[i] = 1;
            grid.remove(static_cast<int>(i), b0.center);
            ++result.deleted;
        } else if (sum < low) {
            double theta = 0.0;
            if (!angles.empty()) {
                std::sort(angles.begin(), angles.end());
                double best = -1.0;
                for (std::size_t k = 0; k < angles.size(); ++k) {
                    const double a = angles[k];
                    const double b = k + 1 < angles.size() ? angles[k + 1] : angles.front() + 2.0 * kPi;
                    if (b - a > best) {
                        best = b - a;
                        theta = 0.5 * (a + b);
                    }
                }
            }
            const double r_new = new_radius ? new_radius(b0.center) : r0;
            Bubble nbub;
            nbub.center = b0.center + Vec2{std::cos(theta), std::sin(theta)} * (r0 + r_new);
            nbub.radius = r_new;
            nbub.kind = BubbleKind::Mobile;
            if (domain && !domain->contains(nbub.center)) continue;
            grid.insert(static_cast<int>(bubbles.size()), nbub.center);
            bubbles.push_back(nbub);
            deleted.push_back(0);
            ++result.inserted;
        }
    }
    if (result.deleted > 0) {
        std::vector<Bubble> kept;
        kept.reserve(bubbles.size());
        for (std::size_t i = 0; i < bubbles.size(); ++i) {
            if (!deleted[i]) kept.push_back(bubbles[i]);
        }
        bubbles = std::move(kept);
    }
    return result;
}

std::size_t qc_boundary_region(std::vector<Bubble>& bubbles, double threshold) {
    if (bubbles.empty()) return 0;
    double max_r = 0.0;
    for (const Bubble& b : bubbles) max_r = std::max(max_r, b.radius);
    SpatialGrid grid(bubble_box(bubbles), 2.0 * max_r);
    for (std::size_t i = 0; i < bubbles.size(); ++i) {
        if (bubbles[i].kind == BubbleKind::Mobile) grid.insert(static_cast<int>(i), bubbles[i].center);
    }
    std::vector<char> removed(bubbles.size(), 0);
    std::size_t count = 0;
    std::vector<std::pair<double, int>> hits;
    for (std::size_t a = 0; a < bubbles.size(); ++a) {
        const Bubble& anchor = bubbles[a];
        if (anchor.kind == BubbleKind::Mobile) continue;
        const double reach = anchor.radius + max_r * (1.0 + std::max(0.0, -threshold));
        hits.clear();
        grid.visit(anchor.center, reach, [&](int j) {
            if (removed[j]) return;
            const double ov = overlap_pairwise(anchor, bubbles[j]);
            if (ov > threshold) hits.emplace_back(ov, j);
        });
        std::sort(hits.begin(), hits.end(), [](const auto& x, const auto& y) {
            return x.first != y.first ? x.first > y.first : x.second < y.second;
        });
        for (const auto& [ov, j] : hits) {
            removed[j] = 1;
            grid.remove(j, bubbles[j].center);
            ++count;
        }
    }
    if (count > 0) {
        std::vector<Bubble> kept;
        kept.reserve(bubbles.size() - count);
        for (std::size_t i = 0; i < bubbles.size(); ++i) {
            if (!removed[i]) kept.push_back(bubbles[i]);
        }
        bubbles = std::move(kept);
    }
    return count;
}

std::string ConvergenceTrace::to_csv() const {
    std::ostringstream out;
    out << "sweep,bubble_count,max_force,min_angle_deg,elapsed_s\n";
    char line[160];
    for (const TraceRow& r : rows) {
        std::snprintf(line, sizeof line, "%d,%zu,%.9g,%.9g,%.6f\n", r.sweep, r.bubble_count,
                      r.max_force, r.min_angle_deg, r.elapsed_s);
        out << line;
    }
    return out.str();
}

double snapshot_min_angle(std::span<const Bubble> bubbles) {
    try {
        PlanarMesh mesh = delaunay_triangulate(bubbles);
        return quality_report(mesh).min_angle;
    } catch (const Error&) {
        return 0.0;
    }
}

RelaxResult relax_until_converged(std::vector<Bubble> bubbles, const PackingDomain& domain,
                                  const DynamicsParams& dyn, const ForceParams& force,
                                  const QcConfig& qc, const RelaxOptions& options) {
    dyn.validate();
    force.validate();
    if (qc.strategy == QcStrategy::Original && qc.period < 1) throw Error("QC period must be at least 1");
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    auto elapsed = [&] {
        return options.record_timing ? std::chrono::duration<double>(Clock::now() - start).count() : 0.0;
    };

    RelaxResult result;
    const DomainIndex dindex(domain);
    // Both strategies start with a quantity-control pass on the input.
    if (qc.strategy == QcStrategy::New) {
        result.qc_changes += static_cast<int>(qc_boundary_region(bubbles, qc.threshold));
    } else {
        result.qc_changes += qc_original(bubbles, qc.low, qc.high, options.new_radius, &dindex).changes();
    }
    std::vector<BubbleState> states = make_states(bubbles);
    NeighborIndex index(states);

    auto tolerance = [&] { return dyn.force_tol * force.k * mean_diameter(states); };
    double tol = tolerance();

    double initial_force = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!states[i].bubble.is_fixed()) {
            initial_force = std::max(initial_force, norm(net_force(states, i, force, index)));
        }
    }
    double min_angle = snapshot_min_angle(bubbles);
    result.trace.rows.push_back({0, states.size(), initial_force, min_angle, elapsed()});

    std::vector<Bubble> best = bubbles;
    double best_angle = min_angle;
    std::size_t window_start = 0;  // first trace row of the current stall window
    const int every = std::max(1, options.snapshot_every);
    bool settled_end = false;

    for (int sweep = 1; sweep <= dyn.max_sweeps; ++sweep) {
        index.rebuild(states);
        const SweepStats stats = relax_step(states, dyn, force, index, &dindex);
        if (sweep % every == 0) min_angle = snapshot_min_angle(bubbles_of(states));
        result.trace.rows.push_back({sweep, states.size(), stats.max_force, min_angle, elapsed()});
        result.sweeps = sweep;
        if (min_angle > best_angle) {
            best_angle = min_angle;
            best = bubbles_of(states);
        }

        bool settled = stats.max_force < tol;
        bool stalled = false;
        const auto& rows = result.trace.rows;
        if (!settled && rows.size() - window_start > static_cast<std::size_t>(dyn.stall_window)) {
            // Stalled when the last window failed to raise the best min angle
            // by stall_tol over the best seen before it.
            const std::size_t split = rows.size() - dyn.stall_window;
            double before = rows[window_start].min_angle_deg, recent = rows[split].min_angle_deg;
            for (std::size_t k = window_start; k < split; ++k) before = std::max(before, rows[k].min_angle_deg);
            for (std::size_t k = split; k < rows.size(); ++k) recent = std::max(recent, rows[k].min_angle_deg);
            stalled = recent - before < dyn.stall_tol_deg;
        }
        bool done = settled || stalled;

        if (qc.strategy == QcStrategy::Original && (done || sweep % qc.period == 0)) {
            std::vector<Bubble> current = bubbles_of(states);
            const QcOriginalResult r = qc_original(current, qc.low, qc.high, options.new_radius, &dindex);
            result.qc_changes += r.changes();
            if (r.changes() > 0) {
                // Survivors keep their velocities; new bubbles start at rest.
                std::vector<BubbleState> next;
                next.reserve(current.size());
                std::size_t cursor = 0;
                for (const Bubble& b : current) {
                    while (cursor < states.size() && !(states[cursor].bubble.center == b.center &&
                                                       states[cursor].bubble.radius == b.radius)) {
                        ++cursor;
                    }
                    if (cursor < states.size()) {
                        next.push_back(states[cursor++]);
                    } else {
                        next.push_back({b, {}});
                    }
                }
                states = std::move(next);
                tol = tolerance();
                window_start = result.trace.rows.size() - 1;
                min_angle = snapshot_min_angle(current);
                result.trace.rows.back().bubble_count = states.size();
                result.trace.rows.back().min_angle_deg = min_angle;
                best_angle = min_angle;
                best = std::move(current);
                done = settled = false;
            }
        }
        if (done) {
            result.converged = true;
            settled_end = settled;
            break;
        }
    }
    // Settled runs end at rest; stalled or capped runs keep the best state
    // since the last quantity-control change.
    result.bubbles = settled_end ? bubbles_of(states) : std::move(best);
    return result;
}

}  // namespace bubblemesh
