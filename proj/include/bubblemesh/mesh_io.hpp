#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bubblemesh/mesh.hpp"

namespace bubblemesh {

/// Reads an OBJ or OFF triangle mesh (chosen by extension). Vertex and face
/// order are preserved. OBJ `vt` records, when every face corner references
/// one with the same index as its vertex, are kept as parametric coordinates.
/// The boundary loop is filled in when the mesh has exactly one; topology is
/// otherwise checked by validate_disk_topology.
TriangleMesh load_mesh(const std::filesystem::path& path);

TriangleMesh parse_obj(const std::string& text);
TriangleMesh parse_off(const std::string& text);

/// Writes by extension (.obj or .off). Coordinates use 9 significant digits.
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);
std::string format_obj(const TriangleMesh& mesh);
std::string format_off(const TriangleMesh& mesh);

/// Rounds every coordinate to what save_mesh writes, so reports computed on
/// the result match reports computed from the file.
TriangleMesh quantize_to_written_precision(const TriangleMesh& mesh);

struct SvgCircle {
    Vec2 center;
    double radius = 0.0;
    std::string color = "#3060c0";
};

/// Edges as line segments; viewBox is the bounding box (y flipped so the
/// picture is upright). Optional circles are drawn underneath.
std::string format_svg(const PlanarMesh& mesh, std::span<const SvgCircle> circles = {});
void save_svg(const PlanarMesh& mesh, const std::filesystem::path& path,
              std::span<const SvgCircle> circles = {});

struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

/// Simple line chart, used for convergence comparisons.
std::string format_svg_chart(std::span<const SvgSeries> series, const std::string& title,
                             const std::string& x_label, const std::string& y_label);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace bubblemesh
