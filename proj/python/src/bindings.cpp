#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bubblemesh/mesh_io.hpp"
#include "bubblemesh/pipeline.hpp"
#include "bubblemesh/sizing.hpp"

namespace py = pybind11;
using namespace bubblemesh;

namespace {

py::dict quality_dict(const MeshQualityReport& q) {
    py::dict d;
    d["triangles"] = q.triangle_count;
    d["min_angle"] = q.min_angle;
    d["max_angle"] = q.max_angle;
    d["histogram"] = std::vector<std::size_t>(q.min_angle_histogram.begin(), q.min_angle_histogram.end());
    d["fraction_30"] = q.fraction_at_least(30.0);
    d["fraction_45"] = q.fraction_at_least(45.0);
    return d;
}

py::array_t<double> vertex_array(const std::vector<Vec3>& v) {
    py::array_t<double> a({static_cast<py::ssize_t>(v.size()), py::ssize_t{3}});
    auto m = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < v.size(); ++i) {
        m(i, 0) = v[i].x;
        m(i, 1) = v[i].y;
        m(i, 2) = v[i].z;
    }
    return a;
}

py::array_t<int> face_array(const std::vector<Face>& f) {
    py::array_t<int> a({static_cast<py::ssize_t>(f.size()), py::ssize_t{3}});
    auto m = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (int k = 0; k < 3; ++k) m(i, k) = f[i][k];
    }
    return a;
}

TriangleMesh mesh_from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> vertices,
                              py::array_t<int, py::array::c_style | py::array::forcecast> faces) {
    if (vertices.ndim() != 2 || (vertices.shape(1) != 3 && vertices.shape(1) != 2)) {
        throw Error("vertices must have shape (n, 2) or (n, 3)");
    }
    if (faces.ndim() != 2 || faces.shape(1) != 3) throw Error("faces must have shape (m, 3)");
    TriangleMesh m;
    auto v = vertices.unchecked<2>();
    for (py::ssize_t i = 0; i < v.shape(0); ++i) {
        m.vertices.push_back({v(i, 0), v(i, 1), v.shape(1) == 3 ? v(i, 2) : 0.0});
    }
    auto f = faces.unchecked<2>();
    for (py::ssize_t i = 0; i < f.shape(0); ++i) m.faces.push_back({f(i, 0), f(i, 1), f(i, 2)});
    return m;
}

PipelineConfig prepared(const std::string& text, const std::filesystem::path& out, const std::string& mode,
                        const std::filesystem::path& base_dir) {
    PipelineConfig c = parse_config(text, base_dir);
    c.mode = mode;
    c.out_dir = out;
    if (!out.empty()) std::filesystem::create_directories(out);
    return finalize_config(c);
}

}  // namespace

PYBIND11_MODULE(_bubblemesh, m) {
    m.doc() = "Bubble packing meshes of plates and parametric surfaces";
    py::register_exception<Error>(m, "BubbleMeshError", PyExc_RuntimeError);

    m.def("g_of_eps", &g_of_eps, py::arg("epsilon"),
          "Allowable edge length over the radius of curvature for a relative chord error.");

    m.def("load_mesh", [](const std::filesystem::path& path) {
        const TriangleMesh mesh = load_mesh(path);
        return py::make_tuple(vertex_array(mesh.vertices), face_array(mesh.faces));
    }, py::arg("path"));

    m.def("quality", [](py::array_t<double, py::array::c_style | py::array::forcecast> vertices,
                        py::array_t<int, py::array::c_style | py::array::forcecast> faces) {
        return quality_dict(quality_report(mesh_from_arrays(vertices, faces)));
    }, py::arg("vertices"), py::arg("faces"));

    m.def("report", [](const std::filesystem::path& path) { return report_mesh_file(path); }, py::arg("path"));

    m.def("run_plane", [](const std::string& config, const std::filesystem::path& out,
                          const std::filesystem::path& base_dir) {
        const PlaneResult r = run_plane_pipeline(prepared(config, out, "plane", base_dir));
        py::dict d = quality_dict(r.quality);
        d["bubbles"] = r.relax.bubbles.size();
        d["sweeps"] = r.relax.sweeps;
        d["converged"] = r.relax.converged;
        d["vertices"] = vertex_array(to_spatial(r.mesh).vertices);
        d["faces"] = face_array(r.mesh.faces);
        return d;
    }, py::arg("config") = "", py::arg("out") = std::filesystem::path{}, py::arg("base_dir") = std::filesystem::path{},
       "Meshes the plate described by the configuration text.");

    m.def("run_surface", [](const std::string& config, const std::filesystem::path& out,
                            const std::filesystem::path& base_dir) {
        const SurfaceResult r = run_surface_pipeline(prepared(config, out, "surface", base_dir));
        py::dict d;
        d["initial"] = quality_dict(r.initial_quality);
        d["final"] = quality_dict(r.final_quality);
        d["vertices"] = vertex_array(r.final_mesh.vertices);
        d["faces"] = face_array(r.final_mesh.faces);
        return d;
    }, py::arg("config") = "", py::arg("out") = std::filesystem::path{}, py::arg("base_dir") = std::filesystem::path{});

    m.def("compare_qc", [](const std::string& config, const std::filesystem::path& out,
                           const std::filesystem::path& base_dir) {
        return run_compare_qc(prepared(config, out, "compare-qc", base_dir)).summary;
    }, py::arg("config") = "", py::arg("out") = std::filesystem::path{}, py::arg("base_dir") = std::filesystem::path{});
}
