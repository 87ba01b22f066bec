#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "bubblemesh/log.hpp"
#include "bubblemesh/mesh_io.hpp"
#include "bubblemesh/pipeline.hpp"

using namespace bubblemesh;

namespace {

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
    auto* opt = sub->add_option("--config", c.config, "configuration file (key = value lines)");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    else opt->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "output directory (overrides 'out')");
    sub->add_option("--seed", c.seed, "random seed (overrides 'seed')");
    sub->add_option("--set", c.overrides, "extra key=value setting, may repeat");
}

PipelineConfig build_config(const Common& c, const std::string& mode) {
    PipelineConfig config;
    if (!c.config.empty()) {
        config = load_config(c.config);
    }
    config.mode = mode;
    for (const std::string& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error("config: --set expects key=value, got '" + kv + "'");
        config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!c.out.empty()) config.out_dir = c.out;
    if (c.seed) config.seed = *c.seed;
    if (config.out_dir.empty()) config.out_dir = "bubblemesh_out";
    config = finalize_config(std::move(config));
    config.validate();
    std::filesystem::create_directories(config.out_dir);
    write_text_file(config.out_dir / "config_used.txt", config.to_text());
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bubble meshing of planar domains and parametric surfaces"};
    app.require_subcommand(1);

    Common plane_opts, surface_opts, remesh_opts, compare_opts;
    auto* plane = app.add_subcommand("plane", "mesh a rectangular plate with optional circular holes");
    add_common(plane, plane_opts, false);
    auto* surface = app.add_subcommand("surface", "mesh a parametric surface through its conformal flattening");
    add_common(surface, surface_opts, false);
    auto* remesh = app.add_subcommand("remesh", "re-mesh an OBJ/OFF disk-topology surface mesh");
    add_common(remesh, remesh_opts, false);
    std::string remesh_input;
    remesh->add_option("input", remesh_input, "input mesh (overrides remesh.input)");
    auto* compare = app.add_subcommand("compare-qc", "compare quantity-control strategies on the same bubbles");
    add_common(compare, compare_opts, false);
    auto* report = app.add_subcommand("report", "print the quality report of a mesh file");
    std::string report_path;
    report->add_option("mesh", report_path, "OBJ or OFF file")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    set_log_sink([](LogLevel level, const std::string& msg) {
        std::cerr << (level == LogLevel::Warning ? "warning: " : "") << msg << "\n";
    });

    try {
        if (*plane) {
            const PipelineConfig config = build_config(plane_opts, "plane");
            const PlaneResult r = run_plane_pipeline(config);
            std::cout << format_quality_report(r.quality, "plane mesh");
        } else if (*surface) {
            const PipelineConfig config = build_config(surface_opts, "surface");
            const SurfaceResult r = run_surface_pipeline(config);
            std::cout << format_quality_report(r.initial_quality, "initial surface")
                      << format_quality_report(r.final_quality, "re-meshed surface");
        } else if (*remesh) {
            if (!remesh_input.empty()) {
                remesh_opts.overrides.push_back("remesh.input=" + std::filesystem::absolute(remesh_input).string());
            }
            const PipelineConfig config = build_config(remesh_opts, "remesh");
            const SurfaceResult r = run_remesh(config);
            std::cout << format_quality_report(r.initial_quality, "input surface")
                      << format_quality_report(r.final_quality, "re-meshed surface");
        } else if (*compare) {
            const PipelineConfig config = build_config(compare_opts, "compare-qc");
            std::cout << run_compare_qc(config).summary;
        } else if (*report) {
            std::cout << report_mesh_file(report_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
