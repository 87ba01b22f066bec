#include "bubblemesh/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bubblemesh/delaunay.hpp"
#include "bubblemesh/locate.hpp"
#include "bubblemesh/log.hpp"
#include "bubblemesh/mesh_io.hpp"
#include "bubblemesh/packing.hpp"

namespace bubblemesh {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty()) return d;
    } catch (const std::exception&) {
    }
    throw Error("config: '" + key + "' expects a number, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != static_cast<int>(d)) throw Error("config: '" + key + "' expects an integer");
    return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error("config: '" + key + "' expects true or false");
}

// Groups separated by ';', numbers within a group by spaces or commas.
std::vector<std::vector<double>> number_groups(const std::string& key, const std::string& v) {
    std::vector<std::vector<double>> out;
    std::stringstream groups(v);
    std::string g;
    while (std::getline(groups, g, ';')) {
        std::replace(g.begin(), g.end(), ',', ' ');
        std::stringstream nums(g);
        std::vector<double> row;
        std::string tok;
        while (nums >> tok) row.push_back(to_double(key, tok));
        if (!row.empty()) out.push_back(std::move(row));
    }
    return out;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::filesystem::path resolve(const PipelineConfig& c, const std::filesystem::path& p) {
    if (p.empty() || p.is_absolute() || c.base_dir.empty()) return p;
    return c.base_dir / p;
}

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(std::string(name) + ": " + e.what());
    }
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

RelaxOptions relax_options(const PipelineConfig& c) {
    RelaxOptions o;
    o.record_timing = c.record_timing;
    o.snapshot_every = c.snapshot_every;
    return o;
}

ForceParams seeded_force(const PipelineConfig& c) {
    ForceParams f = c.force;
    f.seed = c.seed;
    return f;
}

std::vector<SvgCircle> circles_of(std::span<const Bubble> bubbles) {
    std::vector<SvgCircle> out;
    out.reserve(bubbles.size());
    for (const Bubble& b : bubbles) {
        SvgCircle c;
        c.center = b.center;
        c.radius = b.radius;
        c.color = b.kind == BubbleKind::Boundary ? "#c03030"
                  : b.kind == BubbleKind::InteriorAnchor ? "#30a050"
                                                           : "#3060c0";
        out.push_back(c);
    }
    return out;
}

PlanarMesh quantize_planar(const PlanarMesh& mesh) {
    TriangleMesh q = quantize_to_written_precision(to_spatial(mesh));
    PlanarMesh out = to_planar(q);
    return out;
}

std::string timing_line(const PipelineConfig& c, const std::string& label, double seconds) {
    return label + " time (s): " + (c.record_timing ? fmt(seconds) : std::string("0")) + "\n";
}

// Radius for bubbles inserted by the alternating quantity control.
RadiusProvider anchor_radius_provider(std::span<const Bubble> bubbles, const PackingDomain& domain) {
    auto anchors = std::make_shared<std::vector<Bubble>>();
    for (const Bubble& b : bubbles) {
        if (b.is_anchor()) anchors->push_back(b);
    }
    if (anchors->empty()) anchors->assign(bubbles.begin(), bubbles.end());
    auto dom = std::make_shared<PackingDomain>(domain);
    return [anchors, dom](const Vec2& p) { return interpolate_radius(p, *anchors, *dom); };
}

}  // namespace

void PipelineConfig::set(const std::string& key_in, const std::string& value_in) {
    const std::string key = trim(key_in);
    const std::string v = trim(value_in);
    if (key == "mode") {
        mode = v;
    } else if (key == "out") {
        out_dir = v;
    } else if (key == "seed") {
        seed = static_cast<std::uint64_t>(to_double(key, v));
    } else if (key == "record_timing") {
        record_timing = to_bool(key, v);
    } else if (key == "plane.width") {
        width = to_double(key, v);
    } else if (key == "plane.height") {
        height = to_double(key, v);
    } else if (key == "plane.holes") {
        holes.clear();
        for (const auto& g : number_groups(key, v)) {
            if (g.size() != 3) throw Error("config: plane.holes expects 'cx cy r' groups separated by ';'");
            holes.push_back({{g[0], g[1]}, g[2]});
        }
    } else if (key == "anchors") {
        anchors_file = v;
    } else if (key == "surface") {
        surface = v;
    } else if (key.rfind("surface.", 0) == 0) {
        surface_params[key.substr(8)] = to_double(key, v);
    } else if (key == "sizing.epsilon") {
        sizing.epsilon = to_double(key, v);
    } else if (key == "sizing.r_min") {
        sizing.r_min = to_double(key, v);
    } else if (key == "sizing.r_max") {
        sizing.r_max = to_double(key, v);
    } else if (key == "qc.strategy") {
        if (v == "new") qc.strategy = QcStrategy::New;
        else if (v == "original") qc.strategy = QcStrategy::Original;
        else throw Error("config: qc.strategy must be 'new' or 'original'");
    } else if (key == "qc.threshold") {
        qc.threshold = to_double(key, v);
    } else if (key == "qc.low") {
        qc.low = to_double(key, v);
    } else if (key == "qc.high") {
        qc.high = to_double(key, v);
    } else if (key == "qc.period") {
        qc.period = to_int(key, v);
    } else if (key == "dyn.m") {
        dyn.m = to_double(key, v);
    } else if (key == "dyn.c") {
        dyn.c = to_double(key, v);
        explicit_c = true;
    } else if (key == "dyn.dt") {
        dyn.dt = to_double(key, v);
        explicit_dt = true;
    } else if (key == "dyn.force_tol") {
        dyn.force_tol = to_double(key, v);
    } else if (key == "dyn.max_sweeps") {
        dyn.max_sweeps = to_int(key, v);
    } else if (key == "dyn.stall_window") {
        dyn.stall_window = to_int(key, v);
    } else if (key == "dyn.snapshot_every") {
        snapshot_every = to_int(key, v);
    } else if (key == "force.k") {
        force.k = to_double(key, v);
    } else if (key == "force.f0") {
        force.f0 = to_double(key, v);
    } else if (key == "remesh.input") {
        input_mesh = v;
    } else if (key == "remesh.fill_overlap") {
        fill_overlap = to_double(key, v);
    } else if (key == "compare.case") {
        if (v != "plane" && v != "surface") throw Error("config: compare.case must be 'plane' or 'surface'");
        compare_case = v;
    } else if (key == "compare.new_thresholds") {
        compare_new_thresholds.clear();
        for (const auto& g : number_groups(key, v)) {
            compare_new_thresholds.insert(compare_new_thresholds.end(), g.begin(), g.end());
        }
    } else if (key == "compare.original_thresholds") {
        compare_original_thresholds.clear();
        for (const auto& g : number_groups(key, v)) {
            if (g.size() != 2) throw Error("config: compare.original_thresholds expects 'low high' pairs separated by ';'");
            compare_original_thresholds.emplace_back(g[0], g[1]);
        }
    } else {
        throw Error("config: unknown key '" + key + "'");
    }
}

void PipelineConfig::validate() const {
    if (mode != "plane" && mode != "surface" && mode != "remesh" && mode != "compare-qc") {
        throw Error("config: unknown mode '" + mode + "'");
    }
    sizing.validate();
    dyn.validate();
    force.validate();
    if (!(width > 0.0) || !(height > 0.0)) throw Error("config: plate size must be positive");
    for (const CircleHole& h : holes) {
        if (!(h.radius > 0.0)) throw Error("config: hole radius must be positive");
    }
    if (qc.strategy == QcStrategy::Original && !(qc.low < qc.high)) throw Error("config: qc.low must be below qc.high");
    if (qc.period < 1) throw Error("config: qc.period must be at least 1");
    if (snapshot_every < 1) throw Error("config: dyn.snapshot_every must be at least 1");
    if (!anchors_file.empty() && !std::filesystem::exists(resolve(*this, anchors_file))) {
        throw Error("config: anchors file not found: " + resolve(*this, anchors_file).string());
    }
    if (mode == "remesh") {
        if (input_mesh.empty()) throw Error("config: remesh mode needs remesh.input");
        if (!std::filesystem::exists(resolve(*this, input_mesh))) {
            throw Error("config: input mesh not found: " + resolve(*this, input_mesh).string());
        }
    }
}

std::string PipelineConfig::to_text() const {
    std::ostringstream os;
    os << "mode = " << mode << "\n";
    os << "seed = " << seed << "\n";
    os << "record_timing = " << (record_timing ? "true" : "false") << "\n";
    if (mode == "plane" || (mode == "compare-qc" && compare_case == "plane")) {
        os << "plane.width = " << fmt(width) << "\nplane.height = " << fmt(height) << "\n";
        os << "plane.holes = ";
        for (std::size_t i = 0; i < holes.size(); ++i) {
            os << (i ? "; " : "") << fmt(holes[i].center.x) << " " << fmt(holes[i].center.y) << " "
               << fmt(holes[i].radius);
        }
        os << "\n";
        if (!anchors_file.empty()) os << "anchors = " << anchors_file.string() << "\n";
    } else {
        os << "surface = " << surface << "\n";
        for (const auto& [k, v] : surface_params) os << "surface." << k << " = " << fmt(v) << "\n";
    }
    os << "sizing.epsilon = " << fmt(sizing.epsilon) << "\nsizing.r_min = " << fmt(sizing.r_min)
       << "\nsizing.r_max = " << fmt(sizing.r_max) << "\n";
    os << "qc.strategy = " << (qc.strategy == QcStrategy::New ? "new" : "original") << "\n";
    os << "qc.threshold = " << fmt(qc.threshold) << "\nqc.low = " << fmt(qc.low)
       << "\nqc.high = " << fmt(qc.high) << "\nqc.period = " << qc.period << "\n";
    os << "dyn.m = " << fmt(dyn.m) << "\ndyn.c = " << fmt(dyn.c) << "\ndyn.dt = " << fmt(dyn.dt)
       << "\ndyn.force_tol = " << fmt(dyn.force_tol) << "\ndyn.max_sweeps = " << dyn.max_sweeps
       << "\ndyn.stall_window = " << dyn.stall_window << "\n";
    os << "force.k = " << fmt(force.k) << "\nforce.f0 = " << fmt(force.f0) << "\n";
    return os.str();
}

PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    PipelineConfig c;
    c.base_dir = base_dir;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error("config line " + std::to_string(lineno) + ": expected key = value");
        }
        c.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return finalize_config(std::move(c));
}

PipelineConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text_file(path), path.parent_path());
}

PipelineConfig finalize_config(PipelineConfig c) {
    const DynamicsParams d = DynamicsParams::for_stiffness(c.force.k, c.dyn.m);
    if (!c.explicit_c) c.dyn.c = d.c;
    if (!c.explicit_dt) c.dyn.dt = d.dt;
    return c;
}

std::vector<Bubble> load_anchor_csv(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    std::vector<Bubble> out;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double x, y, r;
        if (!(fields >> x >> y >> r)) {
            if (out.empty() && lineno == 1) continue;  // header
            throw Error("anchors file line " + std::to_string(lineno) + ": expected x,y,radius");
        }
        if (!(r > 0.0)) throw Error("anchors file line " + std::to_string(lineno) + ": radius must be positive");
        Bubble b;
        b.center = {x, y};
        b.radius = r;
        b.kind = BubbleKind::InteriorAnchor;
        out.push_back(b);
    }
    return out;
}

std::unique_ptr<ParametricSurface> make_configured_surface(const PipelineConfig& config) {
    return make_surface(config.surface, config.surface_params);
}

PackingDomain make_plane_domain(const PipelineConfig& config, const std::vector<Bubble>& preinserted) {
    std::function<double(const Vec2&)> sizing;
    const double r_min = config.sizing.r_min, r_max = config.sizing.r_max;
    if (r_min == r_max || preinserted.empty()) {
        sizing = [r_max](const Vec2&) { return r_max; };
    } else {
        auto anchors = std::make_shared<std::vector<Bubble>>(preinserted);
        sizing = [anchors, r_min, r_max](const Vec2& p) {
            return std::clamp(interpolate_radius(p, *anchors), r_min, r_max);
        };
    }
    std::vector<Polygon> holes;
    for (const CircleHole& h : config.holes) {
        holes.push_back(circle_polygon_for_sizing(h.center, h.radius, sizing, r_max));
    }
    PackingDomain d = make_domain(rectangle_polygon({0.0, 0.0}, {config.width, config.height}), std::move(holes));
    d.sizing = sizing;
    d.r_min = r_min;
    d.r_max = r_max;
    return d;
}

std::vector<Bubble> initial_plane_bubbles(const PipelineConfig& config, PackingDomain* domain_out) {
    std::vector<Bubble> pre;
    if (!config.anchors_file.empty()) pre = load_anchor_csv(resolve(config, config.anchors_file));
    PackingDomain domain = make_plane_domain(config, pre);
    std::vector<Bubble> bubbles = pack_boundary(domain);
    const DomainIndex index(domain);
    for (const Bubble& b : pre) {
        if (index.contains(b.center)) bubbles.push_back(b);
    }
    const auto interior = pack_interior_quadtree(domain, bubbles);
    bubbles.insert(bubbles.end(), interior.begin(), interior.end());
    if (domain_out) *domain_out = std::move(domain);
    return bubbles;
}

PlaneResult run_plane_pipeline(const PipelineConfig& config) {
    config.validate();
    const Stopwatch clock;
    PlaneResult out;
    PackingDomain domain;
    std::vector<Bubble> bubbles = stage("packing", [&] { return initial_plane_bubbles(config, &domain); });
    out.initial_bubbles = bubbles.size();

    RelaxOptions opt = relax_options(config);
    opt.new_radius = anchor_radius_provider(bubbles, domain);
    out.relax = stage("relaxation", [&] {
        return relax_until_converged(bubbles, domain, config.dyn, seeded_force(config), config.qc, opt);
    });
    if (!out.relax.converged) log_warning("relaxation stopped at the sweep cap without converging");
    out.mesh = stage("triangulation", [&] {
        PlanarMesh m = delaunay_triangulate(std::span<const Bubble>(out.relax.bubbles));
        remove_unreferenced_vertices(m);
        return quantize_planar(m);
    });
    out.quality = quality_report(out.mesh);
    const double seconds = clock.seconds();

    if (!config.out_dir.empty()) {
        const auto& dir = config.out_dir;
        save_mesh(to_spatial(out.mesh), dir / "plane_mesh.obj");
        save_mesh(to_spatial(out.mesh), dir / "plane_mesh.off");
        const auto circles = circles_of(out.relax.bubbles);
        save_svg(delaunay_triangulate(std::span<const Bubble>(out.relax.bubbles)), dir / "plane_bubbles.svg", circles);
        write_text_file(dir / "trace.csv", out.relax.trace.to_csv());
        std::string report = format_quality_report(out.quality, "plane mesh");
        report += "bubbles: " + std::to_string(out.initial_bubbles) + " initial, " +
                  std::to_string(out.relax.bubbles.size()) + " final\n";
        report += "sweeps: " + std::to_string(out.relax.sweeps) +
                  (out.relax.converged ? " (converged)\n" : " (not converged)\n");
        report += timing_line(config, "total", seconds);
        write_text_file(dir / "report.txt", report);
    }
    return out;
}

std::vector<Bubble> initial_surface_bubbles(const ParametricSurface& surface, const PipelineConfig& config,
                                            PackingDomain* domain_out) {
    const ParamDomain& pd = surface.domain();
    PackingDomain domain = make_domain(rectangle_polygon({pd.u0, pd.v0}, {pd.u1, pd.v1}));
    domain.sizing = make_radius_bound(surface, config.sizing);
    domain.r_min = config.sizing.r_min;
    domain.r_max = config.sizing.r_max;
    std::vector<Bubble> bubbles = pack_boundary(domain);
    const auto interior = pack_interior_quadtree(domain, bubbles);
    bubbles.insert(bubbles.end(), interior.begin(), interior.end());
    if (domain_out) *domain_out = std::move(domain);
    return bubbles;
}

TriangleMesh initial_surface_mesh(const ParametricSurface& surface, const PipelineConfig& config,
                                  PlanarMesh* param_mesh) {
    PackingDomain domain;
    std::vector<Bubble> bubbles = initial_surface_bubbles(surface, config, &domain);
    QcConfig qc;
    qc.strategy = QcStrategy::New;
    qc.threshold = 1.0;
    RelaxOptions opt;
    opt.record_timing = false;
    opt.snapshot_every = 10;
    const RelaxResult relaxed = relax_until_converged(bubbles, domain, config.dyn, seeded_force(config), qc, opt);

    PlanarMesh pm = delaunay_triangulate(std::span<const Bubble>(relaxed.bubbles));
    remove_unreferenced_vertices(pm);
    const auto valid = validate_disk_topology(pm);
    if (!valid) throw Error("initial parameter mesh: " + valid.message);

    TriangleMesh mesh;
    mesh.faces = pm.faces;
    mesh.param = pm.vertices;
    mesh.vertices.reserve(pm.vertices.size());
    for (const Vec2& uv : pm.vertices) mesh.vertices.push_back(surface.position(uv.x, uv.y));
    assign_boundary_loop(mesh);
    mesh = quantize_to_written_precision(mesh);
    if (param_mesh) *param_mesh = std::move(pm);
    return mesh;
}

SurfaceResult remesh_surface(const TriangleMesh& input, const PipelineConfig& config) {
    SurfaceResult out;
    out.initial = input;
    out.initial_quality = quality_report(input);
    const Stopwatch clock;
    out.flattening = stage("flattening", [&] { return flatten(input); });

    RemeshOptions ro;
    ro.qc_threshold = config.qc.threshold;
    ro.dyn = config.dyn;
    ro.force = seeded_force(config);
    ro.relax = relax_options(config);
    ro.fill_max_overlap = config.fill_overlap;
    out.remesh = stage("re-meshing", [&] { return remesh_planar(out.flattening.flat, ro); });
    if (!out.remesh.converged) log_warning("re-meshing relaxation stopped at the sweep cap without converging");

    out.final_mesh = stage("inverse mapping", [&] {
        PlanarMesh flat = out.remesh.mesh;
        remove_unreferenced_vertices(flat);
        return quantize_to_written_precision(inverse_map(flat, out.flattening.flat, input));
    });
    out.remesh_seconds = clock.seconds();
    out.final_quality = quality_report(out.final_mesh);
    return out;
}

namespace {

void write_surface_outputs(const PipelineConfig& config, const SurfaceResult& r, bool with_param) {
    if (config.out_dir.empty()) return;
    const auto& dir = config.out_dir;
    save_mesh(r.initial, dir / "initial_surface.obj");
    save_mesh(r.final_mesh, dir / "final_surface.obj");
    save_mesh(r.final_mesh, dir / "final_surface.off");
    if (with_param) save_svg(r.param_mesh, dir / "initial_param.svg");
    save_svg(r.flattening.flat, dir / "initial_flat.svg");
    save_svg(r.remesh.mesh, dir / "remeshed_flat.svg", circles_of(r.remesh.bubbles));
    write_text_file(dir / "trace.csv", r.remesh.trace.to_csv());
    std::string report = format_quality_report(r.initial_quality, "initial surface");
    report += format_quality_report(r.final_quality, "re-meshed surface");
    char buf[256];
    std::snprintf(buf, sizeof buf, "quasi-conformal distortion: mean %.6f max %.6f\n",
                  r.flattening.mean_distortion, r.flattening.max_distortion);
    report += buf;
    report += "bubbles: " + std::to_string(r.remesh.reconstructed) + " reconstructed, " +
              std::to_string(r.remesh.inserted) + " inserted, " + std::to_string(r.remesh.removed) +
              " removed, " + std::to_string(r.remesh.bubbles.size()) + " final\n";
    report += "sweeps: " + std::to_string(r.remesh.sweeps) +
              (r.remesh.converged ? " (converged)\n" : " (not converged)\n");
    report += timing_line(config, "re-meshing", r.remesh_seconds);
    write_text_file(dir / "report.txt", report);
}

}  // namespace

SurfaceResult run_surface_pipeline(const PipelineConfig& config) {
    config.validate();
    const auto surface = stage("surface", [&] { return make_configured_surface(config); });
    PlanarMesh param_mesh;
    TriangleMesh initial = stage("initial mesh", [&] { return initial_surface_mesh(*surface, config, &param_mesh); });
    if (!config.out_dir.empty()) {
        save_mesh(initial, config.out_dir / "initial_surface.obj");
        save_svg(param_mesh, config.out_dir / "initial_param.svg");
    }
    SurfaceResult r = remesh_surface(initial, config);
    r.param_mesh = std::move(param_mesh);
    write_surface_outputs(config, r, true);
    return r;
}

SurfaceResult run_remesh(const PipelineConfig& config) {
    config.validate();
    const TriangleMesh input = stage("input", [&] {
        TriangleMesh m = load_mesh(resolve(config, config.input_mesh));
        const auto valid = validate_disk_topology(m);
        if (!valid) throw Error(valid.message);
        return m;
    });
    SurfaceResult r = remesh_surface(input, config);
    write_surface_outputs(config, r, false);
    return r;
}

std::optional<double> time_to_quality(const ConvergenceTrace& trace, double target_deg, bool by_sweep) {
    for (const TraceRow& row : trace.rows) {
        if (row.min_angle_deg >= target_deg) return by_sweep ? static_cast<double>(row.sweep) : row.elapsed_s;
    }
    return std::nullopt;
}

CompareResult run_compare_qc(const PipelineConfig& config) {
    config.validate();
    std::vector<Bubble> initial;
    PackingDomain domain;
    std::unique_ptr<ParametricSurface> surface_holder;  // referenced by the domain sizing
    if (config.compare_case == "plane") {
        initial = stage("packing", [&] { return initial_plane_bubbles(config, &domain); });
    } else {
        initial = stage("packing", [&] {
            surface_holder = make_configured_surface(config);
            return initial_surface_bubbles(*surface_holder, config, &domain);
        });
    }

    std::vector<QcConfig> plans;
    std::vector<std::string> labels;
    for (double t : config.compare_new_thresholds) {
        QcConfig q;
        q.strategy = QcStrategy::New;
        q.threshold = t;
        plans.push_back(q);
        labels.push_back("new_" + fmt(t));
    }
    for (const auto& [lo, hi] : config.compare_original_thresholds) {
        QcConfig q;
        q.strategy = QcStrategy::Original;
        q.low = lo;
        q.high = hi;
        q.period = config.qc.period;
        plans.push_back(q);
        labels.push_back("original_" + fmt(lo) + "_" + fmt(hi));
    }

    CompareResult out;
    RelaxOptions opt = relax_options(config);
    opt.new_radius = anchor_radius_provider(initial, domain);
    for (std::size_t k = 0; k < plans.size(); ++k) {
        CompareRun run;
        run.label = labels[k];
        run.qc = plans[k];
        const Stopwatch clock;
        run.result = stage("relaxation", [&] {
            return relax_until_converged(initial, domain, config.dyn, seeded_force(config), plans[k], opt);
        });
        run.seconds = config.record_timing ? clock.seconds() : 0.0;
        PlanarMesh m = delaunay_triangulate(std::span<const Bubble>(run.result.bubbles));
        remove_unreferenced_vertices(m);
        run.quality = quality_report(m);
        out.runs.push_back(std::move(run));
    }

    // Summary: time for each run to reach the first new-QC run's final quality.
    std::ostringstream os;
    os << "initial bubbles: " << initial.size() << "\n";
    os << "run\tconverged\tsweeps\ttime_s\tbubbles\tmin_angle\t0-15\t15-30\t30-45\t45-60\ttime_to_reference_s\n";
    double target = -1.0;
    for (const CompareRun& r : out.runs) {
        if (r.qc.strategy == QcStrategy::New) {
            target = r.result.trace.rows.back().min_angle_deg - 0.1;
            break;
        }
    }
    for (const CompareRun& r : out.runs) {
        const auto& h = r.quality.min_angle_histogram;
        const auto ttq = target >= 0.0 ? time_to_quality(r.result.trace, target) : std::nullopt;
        char buf[512];
        std::snprintf(buf, sizeof buf, "%s\t%s\t%d\t%.3f\t%zu\t%.4f\t%zu\t%zu\t%zu\t%zu\t%s\n", r.label.c_str(),
                      r.result.converged ? "yes" : "no", r.result.sweeps, r.seconds,
                      r.result.bubbles.size(), r.quality.min_angle, h[0], h[1], h[2], h[3],
                      ttq ? fmt(*ttq).c_str() : "never");
        os << buf;
    }
    out.summary = os.str();

    if (!config.out_dir.empty()) {
        const auto& dir = config.out_dir;
        std::vector<SvgSeries> series;
        const char* colors[] = {"#c03030", "#3060c0", "#30a050", "#a050c0", "#c08020", "#208080"};
        for (std::size_t k = 0; k < out.runs.size(); ++k) {
            const CompareRun& r = out.runs[k];
            write_text_file(dir / ("trace_" + r.label + ".csv"), r.result.trace.to_csv());
            SvgSeries s;
            s.label = r.label;
            s.color = colors[k % 6];
            for (const TraceRow& row : r.result.trace.rows) {
                s.x.push_back(row.sweep);
                s.y.push_back(row.min_angle_deg);
            }
            series.push_back(std::move(s));
        }
        write_text_file(dir / "compare_summary.txt", out.summary);
        write_text_file(dir / "compare_min_angle.svg",
                        format_svg_chart(series, "Minimum angle during relaxation", "sweep", "min angle (deg)"));
    }
    return out;
}

std::string report_mesh_file(const std::filesystem::path& path) {
    const TriangleMesh mesh = load_mesh(path);
    return format_quality_report(quality_report(mesh), path.filename().string());
}

}  // namespace bubblemesh
