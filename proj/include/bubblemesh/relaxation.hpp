#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bubblemesh/bubble.hpp"
#include "bubblemesh/spatial_grid.hpp"

namespace bubblemesh {

/// Interaction law. The force is a cubic in w = l / l0 (l0 = ri + rj) with
/// F(0) = f0 * l0, F(1) = 0, F'(1) = -k * l0 and F(cutoff_factor) = 0; it is
/// zero beyond the cutoff.
struct ForceParams {
    double k = 1.0;
    double f0 = 1.0;
    double cutoff_factor = 1.5;
    std::uint64_t seed = 0;  // direction of the push for coincident centres

    void validate() const;
};

struct DynamicsParams {
    double m = 1.0;
    double c = 1.4;   // 1.4 * sqrt(m * k)
    double dt = 0.2;  // 0.2 * sqrt(m / k)
    /// Convergence threshold on the largest net force, in units of
    /// k * (mean bubble diameter).
    double force_tol = 1e-3;
    int max_sweeps = 2000;
    int stall_window = 30;
    double stall_tol_deg = 0.1;

    void validate() const;
    /// Defaults derived from a stiffness: c = 1.4 sqrt(m k), dt = 0.2 sqrt(m / k).
    static DynamicsParams for_stiffness(double k, double m = 1.0);
};

/// Signed force magnitude at normalised distance w (positive = repulsive).
double force_magnitude(double w, double l0, const ForceParams& params);

/// Force exerted on bubble i by bubble j. `i` and `j` identify the pair for
/// the coincident-centre fallback direction.
Vec2 pair_force(const Bubble& bi, const Bubble& bj, const ForceParams& params, std::size_t i = 0,
                std::size_t j = 1);

struct BubbleState {
    Bubble bubble;
    Vec2 velocity;
};

std::vector<BubbleState> make_states(std::span<const Bubble> bubbles);
std::vector<Bubble> bubbles_of(std::span<const BubbleState> states);

/// Uniform-grid neighbour index over bubble centres (cell = 2 * max radius).
class NeighborIndex {
public:
    NeighborIndex() = default;
    explicit NeighborIndex(std::span<const BubbleState> states) { rebuild(states); }
    explicit NeighborIndex(std::span<const Bubble> bubbles) { rebuild(bubbles); }

    void rebuild(std::span<const BubbleState> states);
    void rebuild(std::span<const Bubble> bubbles);

    /// Indices whose stored centre may lie within `reach` of p.
    template <class Fn>
    void visit(const Vec2& p, double reach, Fn&& fn) const {
        grid_.visit(p, reach, std::forward<Fn>(fn));
    }
    double max_radius() const { return max_radius_; }

private:
    void rebuild_impl(std::size_t n, const std::function<const Bubble&(std::size_t)>& at);
    SpatialGrid grid_;
    double max_radius_ = 0.0;
};


/// Optional extra force on bubble i at position p (testing hook).
using ExternalForce = std::function<Vec2(std::size_t, const Vec2&)>;

struct SweepStats {
    double max_force = 0.0;  // largest net force magnitude at sweep start positions
    int projected = 0;       // bubbles moved back into the domain
};

/// One sweep: every non-fixed bubble, in index order, integrates
/// m x'' + c x' = f over one dt with classical RK4 while the others stay put.
/// Bubbles that leave the domain are placed back inside at their radius from
/// the nearest boundary point.
SweepStats relax_step(std::vector<BubbleState>& states, const DynamicsParams& dyn,
                      const ForceParams& force, const NeighborIndex& index,
                      const DomainIndex* domain = nullptr, const ExternalForce& external = {});

/// Net force on bubble i at its current position.
Vec2 net_force(std::span<const BubbleState> states, std::size_t i, const ForceParams& force,
               const NeighborIndex& index);

/// Summed overlap sum (2 r0 + rj - lj) / r0 over neighbours with lj <= 2 r0.
double overlap_original(std::size_t i, std::span<const Bubble> bubbles, const NeighborIndex& index);

using RadiusProvider = std::function<double(const Vec2&)>;

struct QcOriginalResult {
    int inserted = 0;
    int deleted = 0;
    int changes() const { return inserted + deleted; }
};

/// One pass of the alternating quantity control over mobile bubbles in index
/// order: a bubble whose summed overlap is below `low` gets a new neighbour in
/// its widest angular gap, one above `high` is deleted.
QcOriginalResult qc_original(std::vector<Bubble>& bubbles, double low, double high,
                             const RadiusProvider& new_radius,
                             const DomainIndex* domain = nullptr);

/// Boundary-region quantity control: for each anchor in list order, removes
/// mobile bubbles whose pairwise overlap with it exceeds the threshold, most
/// overlapping first. Returns the number removed.
std::size_t qc_boundary_region(std::vector<Bubble>& bubbles, double threshold);

struct TraceRow {
    int sweep = 0;
    std::size_t bubble_count = 0;
    double max_force = 0.0;
    double min_angle_deg = 0.0;
    double elapsed_s = 0.0;
};

struct ConvergenceTrace {
    std::vector<TraceRow> rows;
    std::string to_csv() const;
};

enum class QcStrategy { New, Original };

struct QcConfig {
    QcStrategy strategy = QcStrategy::New;
    double threshold = 1.0;  // boundary-region overlap limit
    double low = 5.0;
    double high = 8.0;
    int period = 10;  // sweeps between original QC passes
};

struct RelaxOptions {
    RadiusProvider new_radius;  // radius of bubbles inserted by the original QC
    bool record_timing = true;  // false: elapsed_s stays 0 (reproducible traces)
    int snapshot_every = 1;     // triangulate for the min angle every n sweeps
};

struct RelaxResult {
    std::vector<Bubble> bubbles;
    ConvergenceTrace trace;
    bool converged = false;
    int sweeps = 0;
    int qc_changes = 0;  // bubbles removed or inserted by quantity control
};

/// Quantity control plus relaxation until the largest net force drops below
/// tolerance, the minimum mesh angle stalls, or the sweep cap is reached.
RelaxResult relax_until_converged(std::vector<Bubble> bubbles, const PackingDomain& domain,
                                  const DynamicsParams& dyn, const ForceParams& force,
                                  const QcConfig& qc, const RelaxOptions& options = {});

/// Minimum angle (degrees) of the constrained triangulation of the bubbles.
double snapshot_min_angle(std::span<const Bubble> bubbles);

}  // namespace bubblemesh
