#include "bubblemesh/mesh_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bubblemesh {

namespace {

std::string lower_ext(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

double round9(double v) { return std::strtod(fmt9(v).c_str(), nullptr); }

// Resolves an OBJ index token (1-based, negative = relative).
int resolve_obj_index(const std::string& tok, std::size_t count, int line_no) {
    char* end = nullptr;
    const long idx = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str()) {
        throw Error("parse error at line " + std::to_string(line_no) + ": bad index '" + tok + "'");
    }
    long zero_based = idx > 0 ? idx - 1 : static_cast<long>(count) + idx;
    if (idx == 0 || zero_based < 0) {
        throw Error("parse error at line " + std::to_string(line_no) + ": index out of range");
    }
    return static_cast<int>(zero_based);
}

}  // namespace

TriangleMesh parse_obj(const std::string& text) {
    TriangleMesh mesh;
    std::vector<Vec2> texcoords;
    std::vector<Face> tex_faces;
    bool tex_complete = true;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x >> p.y >> p.z)) {
                throw Error("parse error at line " + std::to_string(line_no) + ": bad vertex");
            }
            mesh.vertices.push_back(p);
        } else if (tag == "vt") {
            Vec2 t;
            if (!(ls >> t.x >> t.y)) {
                throw Error("parse error at line " + std::to_string(line_no) + ": bad texcoord");
            }
            texcoords.push_back(t);
        } else if (tag == "f") {
            std::vector<std::string> corners;
            std::string tok;
            while (ls >> tok) corners.push_back(tok);
            if (corners.size() != 3) {
                throw Error("non-triangular face at line " + std::to_string(line_no));
            }
            Face f{}, tf{};
            for (int k = 0; k < 3; ++k) {
                const std::string& c = corners[k];
                const auto slash = c.find('/');
                f[k] = resolve_obj_index(c.substr(0, slash), mesh.vertices.size(), line_no);
                if (slash != std::string::npos && slash + 1 < c.size() && c[slash + 1] != '/') {
                    const auto rest = c.substr(slash + 1);
                    tf[k] = resolve_obj_index(rest.substr(0, rest.find('/')), texcoords.size(),
                                              line_no);
                } else {
                    tex_complete = false;
                }
            }
            mesh.faces.push_back(f);
            tex_faces.push_back(tf);
        }
    }

    for (const Face& f : mesh.faces) {
        for (int v : f) {
            if (static_cast<std::size_t>(v) >= mesh.vertices.size()) {
                throw Error("parse error: face references missing vertex " + std::to_string(v + 1));
            }
        }
    }
    if (tex_complete && !texcoords.empty() && texcoords.size() == mesh.vertices.size()) {
        bool same = true;
        for (std::size_t i = 0; i < mesh.faces.size() && same; ++i) same = mesh.faces[i] == tex_faces[i];
        if (same) mesh.param = texcoords;
    }
    try {
        assign_boundary_loop(mesh);
    } catch (const Error&) {
        mesh.boundary_loop.clear();
    }
    return mesh;
}

TriangleMesh parse_off(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> tokens;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
    }
    std::size_t pos = 0;
    auto next = [&]() -> const std::string& {
        if (pos >= tokens.size()) throw Error("parse error: unexpected end of OFF file");
        return tokens[pos++];
    };
    auto next_number = [&]() {
        const std::string& t = next();
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0') throw Error("parse error: bad number '" + t + "'");
        return v;
    };

    if (tokens.empty() || tokens[0] != "OFF") throw Error("parse error: missing OFF header");
    pos = 1;
    const auto nv = static_cast<std::size_t>(next_number());
    const auto nf = static_cast<std::size_t>(next_number());
    next_number();  // edge count, unused

    TriangleMesh mesh;
    mesh.vertices.resize(nv);
    for (auto& p : mesh.vertices) {
        p.x = next_number();
        p.y = next_number();
        p.z = next_number();
    }
    mesh.faces.resize(nf);
    for (std::size_t i = 0; i < nf; ++i) {
        const auto n = static_cast<int>(next_number());
        if (n != 3) throw Error("non-triangular face " + std::to_string(i));
        for (int k = 0; k < 3; ++k) {
            const auto v = static_cast<long>(next_number());
            if (v < 0 || static_cast<std::size_t>(v) >= nv) {
                throw Error("parse error: face " + std::to_string(i) + " index out of range");
            }
            mesh.faces[i][k] = static_cast<int>(v);
        }
    }
    try {
        assign_boundary_loop(mesh);
    } catch (const Error&) {
        mesh.boundary_loop.clear();
    }
    return mesh;
}

TriangleMesh load_mesh(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error("file not found: " + path.string());
    const std::string ext = lower_ext(path);
    const std::string text = read_text_file(path);
    if (ext == ".obj") return parse_obj(text);
    if (ext == ".off") return parse_off(text);
    throw Error("unsupported mesh format '" + ext + "' (expected .obj or .off)");
}

std::string format_obj(const TriangleMesh& mesh) {
    std::ostringstream os;
    for (const Vec3& p : mesh.vertices) {
        os << "v " << fmt9(p.x) << ' ' << fmt9(p.y) << ' ' << fmt9(p.z) << '\n';
    }
    const bool tex = mesh.has_param();
    if (tex) {
        for (const Vec2& t : mesh.param) os << "vt " << fmt9(t.x) << ' ' << fmt9(t.y) << '\n';
    }
    for (const Face& f : mesh.faces) {
        os << 'f';
        for (int v : f) {
            os << ' ' << (v + 1);
            if (tex) os << '/' << (v + 1);
        }
        os << '\n';
    }
    return os.str();
}

std::string format_off(const TriangleMesh& mesh) {
    std::ostringstream os;
    os << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
    for (const Vec3& p : mesh.vertices) {
        os << fmt9(p.x) << ' ' << fmt9(p.y) << ' ' << fmt9(p.z) << '\n';
    }
    for (const Face& f : mesh.faces) os << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    return os.str();
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".obj") {
        write_text_file(path, format_obj(mesh));
    } else if (ext == ".off") {
        write_text_file(path, format_off(mesh));
    } else {
        throw Error("unsupported mesh format '" + ext + "' (expected .obj or .off)");
    }
}

TriangleMesh quantize_to_written_precision(const TriangleMesh& mesh) {
    TriangleMesh out = mesh;
    for (Vec3& p : out.vertices) p = {round9(p.x), round9(p.y), round9(p.z)};
    for (Vec2& t : out.param) t = {round9(t.x), round9(t.y)};
    return out;
}

std::string format_svg(const PlanarMesh& mesh, std::span<const SvgCircle> circles) {
    Box2 box = bounding_box_2d(mesh);
    for (const auto& c : circles) {
        box.extend(c.center - Vec2{c.radius, c.radius});
        box.extend(c.center + Vec2{c.radius, c.radius});
    }
    if (box.empty()) box = Box2{{0, 0}, {1, 1}};
    const double w = std::max(box.width(), 1e-12);
    const double h = std::max(box.height(), 1e-12);
    const double stroke = 0.002 * std::max(w, h);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt9(box.lo.x) << ' '
       << fmt9(-box.hi.y) << ' ' << fmt9(w) << ' ' << fmt9(h) << "\">\n";
    for (const auto& c : circles) {
        os << "<circle cx=\"" << fmt9(c.center.x) << "\" cy=\"" << fmt9(-c.center.y) << "\" r=\""
           << fmt9(c.radius) << "\" fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\""
           << fmt9(stroke) << "\"/>\n";
    }
    std::vector<Edge> edges;
    edges.reserve(mesh.faces.size() * 3);
    for (const Face& f : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            const int a = f[k], b = f[(k + 1) % 3];
            edges.push_back({std::min(a, b), std::max(a, b)});
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    os << "<g stroke=\"black\" stroke-width=\"" << fmt9(stroke) << "\">\n";
    for (const Edge& e : edges) {
        const Vec2& p = mesh.vertices[e.a];
        const Vec2& q = mesh.vertices[e.b];
        os << "<line x1=\"" << fmt9(p.x) << "\" y1=\"" << fmt9(-p.y) << "\" x2=\"" << fmt9(q.x)
           << "\" y2=\"" << fmt9(-q.y) << "\"/>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

void save_svg(const PlanarMesh& mesh, const std::filesystem::path& path,
              std::span<const SvgCircle> circles) {
    write_text_file(path, format_svg(mesh, circles));
}

std::string format_svg_chart(std::span<const SvgSeries> series, const std::string& title,
                             const std::string& x_label, const std::string& y_label) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series) {
        for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
        for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
    if (x0 > x1) x0 = 0, x1 = 1;
    if (y0 > y1) y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x1 = x0 + 1;
    if (y1 - y0 < 1e-12) y1 = y0 + 1;

    const double W = 640, H = 400, L = 60, R = 20, T = 40, B = 50;
    auto sx = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
    auto sy = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << x_label
       << "</text>\n";
    os << "<text x=\"15\" y=\"" << H / 2 << "\" transform=\"rotate(-90 15 " << H / 2
       << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
    os << "<text x=\"" << L << "\" y=\"" << H - B + 15 << "\">" << fmt9(x0) << "</text>\n";
    os << "<text x=\"" << W - R << "\" y=\"" << H - B + 15 << "\" text-anchor=\"end\">"
       << fmt9(x1) << "</text>\n";
    os << "<text x=\"" << L - 5 << "\" y=\"" << H - B << "\" text-anchor=\"end\">" << fmt9(y0)
       << "</text>\n";
    os << "<text x=\"" << L - 5 << "\" y=\"" << T + 5 << "\" text-anchor=\"end\">" << fmt9(y1)
       << "</text>\n";
    int row = 0;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            os << fmt9(sx(s.x[i])) << ',' << fmt9(sy(s.y[i])) << ' ';
        }
        os << "\"/>\n";
        os << "<text x=\"" << W - R - 150 << "\" y=\"" << T + 15 * (row + 1) << "\" fill=\""
           << s.color << "\">" << s.label << "</text>\n";
        ++row;
    }
    os << "</svg>\n";
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace bubblemesh
