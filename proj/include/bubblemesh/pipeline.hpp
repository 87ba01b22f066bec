#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bubblemesh/conformal.hpp"
#include "bubblemesh/mesh.hpp"
#include "bubblemesh/relaxation.hpp"
#include "bubblemesh/remesh.hpp"
#include "bubblemesh/sizing.hpp"
#include "bubblemesh/surface.hpp"

namespace bubblemesh {

struct CircleHole {
    Vec2 center;
    double radius = 0.0;
};

/// Run configuration. Read from `key = value` lines (`#` starts a comment);
/// see README for the key list and defaults.
struct PipelineConfig {
    std::string mode = "plane";
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    bool record_timing = true;

    // plane
    double width = 20.0;
    double height = 10.0;
    std::vector<CircleHole> holes;
    std::filesystem::path anchors_file;  // CSV x,y,radius of pre-inserted anchors

    // surface
    std::string surface = "sphere";
    std::map<std::string, double> surface_params;

    SizingParams sizing;

    QcConfig qc;
    DynamicsParams dyn;
    ForceParams force;
    int snapshot_every = 1;

    // remesh
    std::filesystem::path input_mesh;
    double fill_overlap = kGapFillOverlap;

    // compare-qc
    std::string compare_case = "plane";
    std::vector<double> compare_new_thresholds{1.0};
    std::vector<std::pair<double, double>> compare_original_thresholds{{5.0, 8.0}};

    /// Applies one `key = value` setting; throws on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    void validate() const;
    std::string to_text() const;

    /// Base for relative paths in the file.
    std::filesystem::path base_dir;
    bool explicit_c = false;   // dyn.c given rather than derived from k
    bool explicit_dt = false;  // dyn.dt given rather than derived from k
};

PipelineConfig parse_config(const std::string& text,
                            const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
/// Derives damping and time step from the stiffness unless set explicitly.
PipelineConfig finalize_config(PipelineConfig config);

/// Reads pre-inserted anchors: one `x,y,radius` per line, optional header.
std::vector<Bubble> load_anchor_csv(const std::filesystem::path& path);

std::unique_ptr<ParametricSurface> make_configured_surface(const PipelineConfig& config);

/// Plate domain of the configuration (rectangle with circular holes) with its
/// sizing: constant when r_min == r_max, otherwise interpolated from the
/// pre-inserted anchors and clamped to [r_min, r_max].
PackingDomain make_plane_domain(const PipelineConfig& config,
                                const std::vector<Bubble>& preinserted);

/// Boundary, pre-inserted and quadtree interior bubbles of the plate.
std::vector<Bubble> initial_plane_bubbles(const PipelineConfig& config, PackingDomain* domain_out = nullptr);

struct PlaneResult {
    PlanarMesh mesh;
    RelaxResult relax;
    MeshQualityReport quality;
    std::size_t initial_bubbles = 0;
};

PlaneResult run_plane_pipeline(const PipelineConfig& config);

struct SurfaceResult {
    PlanarMesh param_mesh;       // initial mesh in the parameter plane
    TriangleMesh initial;        // initial discrete surface
    FlattenResult flattening;
    RemeshResult remesh;
    TriangleMesh final_mesh;
    MeshQualityReport initial_quality;
    MeshQualityReport final_quality;
    double remesh_seconds = 0.0;
};

/// Boundary and quadtree interior bubbles of the parameter rectangle under
/// the curvature radius bound. The domain's sizing refers to `surface`.
std::vector<Bubble> initial_surface_bubbles(const ParametricSurface& surface, const PipelineConfig& config,
                                            PackingDomain* domain_out = nullptr);

/// Initial discrete surface: bubble mesh of the parameter rectangle lifted
/// through the surface map (parameter values kept per vertex).
TriangleMesh initial_surface_mesh(const ParametricSurface& surface, const PipelineConfig& config,
                                  PlanarMesh* param_mesh = nullptr);

SurfaceResult run_surface_pipeline(const PipelineConfig& config);

/// Flatten, re-mesh and map back an input mesh file (or a given mesh).
SurfaceResult run_remesh(const PipelineConfig& config);
SurfaceResult remesh_surface(const TriangleMesh& input, const PipelineConfig& config);

struct CompareRun {
    std::string label;
    QcConfig qc;
    RelaxResult result;
    MeshQualityReport quality;
    double seconds = 0.0;
};

struct CompareResult {
    std::vector<CompareRun> runs;
    std::string summary;
};

/// Runs the same initial bubbles through every configured strategy and
/// threshold; writes paired traces, a summary and a chart.
CompareResult run_compare_qc(const PipelineConfig& config);

/// First elapsed time (or sweep, when `by_sweep`) at which the trace's min
/// angle reaches `target_deg`.
std::optional<double> time_to_quality(const ConvergenceTrace& trace, double target_deg,
                                      bool by_sweep = false);

/// Quality report of a mesh file, formatted like the run reports.
std::string report_mesh_file(const std::filesystem::path& path);

}  // namespace bubblemesh
