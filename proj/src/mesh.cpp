#include "bubblemesh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace bubblemesh {

int EdgeAdjacency::find(int a, int b) const {
    const Edge key{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(edges.begin(), edges.end(), key);
    if (it == edges.end() || *it != key) return -1;
    return static_cast<int>(it - edges.begin());
}

EdgeAdjacency build_edge_adjacency(std::span<const Face> faces, std::size_t vertex_count) {
    EdgeAdjacency adj;
    adj.edges.reserve(faces.size() * 3);
    for (const Face& f : faces) {
        for (int k = 0; k < 3; ++k) {
            const int a = f[(k + 1) % 3];
            const int b = f[(k + 2) % 3];
            if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= vertex_count ||
                static_cast<std::size_t>(b) >= vertex_count) {
                throw Error("face references vertex out of range");
            }
            adj.edges.push_back({std::min(a, b), std::max(a, b)});
        }
    }
    std::sort(adj.edges.begin(), adj.edges.end());
    adj.edges.erase(std::unique(adj.edges.begin(), adj.edges.end()), adj.edges.end());

    adj.faces.assign(adj.edges.size(), {-1, -1});
    adj.face_edges.resize(faces.size());
    std::vector<int> incidence(adj.edges.size(), 0);
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        const Face& f = faces[fi];
        for (int k = 0; k < 3; ++k) {
            const int e = adj.find(f[(k + 1) % 3], f[(k + 2) % 3]);
            adj.face_edges[fi][k] = e;
            if (incidence[e] < 2) adj.faces[e][incidence[e]] = static_cast<int>(fi);
            ++incidence[e];
        }
    }
    for (std::size_t e = 0; e < adj.edges.size(); ++e) {
        if (incidence[e] > 2) {
            throw Error("non-manifold edge (" + std::to_string(adj.edges[e].a) + ", " +
                        std::to_string(adj.edges[e].b) + ") shared by " +
                        std::to_string(incidence[e]) + " faces");
        }
    }
    return adj;
}

std::vector<std::vector<int>> vertex_faces(std::span<const Face> faces, std::size_t vertex_count) {
    std::vector<std::vector<int>> out(vertex_count);
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        for (int v : faces[fi]) out[v].push_back(static_cast<int>(fi));
    }
    return out;
}

std::vector<std::vector<int>> vertex_neighbors(std::span<const Face> faces,
                                               std::size_t vertex_count) {
    std::vector<std::vector<int>> out(vertex_count);
    for (const Face& f : faces) {
        for (int k = 0; k < 3; ++k) {
            out[f[k]].push_back(f[(k + 1) % 3]);
            out[f[k]].push_back(f[(k + 2) % 3]);
        }
    }
    for (auto& n : out) {
        std::sort(n.begin(), n.end());
        n.erase(std::unique(n.begin(), n.end()), n.end());
    }
    return out;
}

std::vector<std::vector<int>> boundary_loops(std::span<const Face> faces,
                                             std::size_t vertex_count) {
    // A directed edge a->b is on the boundary when b->a is not used by any face.
    std::map<std::pair<int, int>, int> directed;
    for (const Face& f : faces) {
        for (int k = 0; k < 3; ++k) ++directed[{f[k], f[(k + 1) % 3]}];
    }
    std::vector<int> next(vertex_count, -1);
    std::vector<int> starts;
    for (const auto& [e, count] : directed) {
        if (directed.count({e.second, e.first}) != 0) continue;
        if (next[e.first] != -1) {
            throw Error("non-manifold boundary vertex " + std::to_string(e.first));
        }
        next[e.first] = e.second;
        starts.push_back(e.first);
    }
    std::sort(starts.begin(), starts.end());

    std::vector<std::vector<int>> loops;
    std::vector<char> visited(vertex_count, 0);
    for (int s : starts) {
        if (visited[s]) continue;
        std::vector<int> loop;
        int v = s;
        while (v != -1 && !visited[v]) {
            visited[v] = 1;
            loop.push_back(v);
            v = next[v];
        }
        if (v != s) throw Error("open boundary chain at vertex " + std::to_string(s));
        loops.push_back(std::move(loop));
    }
    return loops;
}

ValidationResult validate_disk_topology(std::span<const Face> faces, std::size_t vertex_count) {
    if (faces.empty()) return {false, "mesh has no faces"};
    for (const Face& f : faces) {
        for (int v : f) {
            if (v < 0 || static_cast<std::size_t>(v) >= vertex_count) {
                return {false, "face references vertex out of range"};
            }
        }
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
            return {false, "face with repeated vertex"};
        }
    }

    EdgeAdjacency adj;
    try {
        adj = build_edge_adjacency(faces, vertex_count);
    } catch (const Error& e) {
        return {false, std::string("not manifold: ") + e.what()};
    }

    // Orientation consistency: an interior edge must be traversed once each way.
    std::map<std::pair<int, int>, int> directed;
    for (const Face& f : faces) {
        for (int k = 0; k < 3; ++k) {
            if (++directed[{f[k], f[(k + 1) % 3]}] > 1) {
                return {false, "inconsistent face orientation at edge (" + std::to_string(f[k]) +
                                   ", " + std::to_string(f[(k + 1) % 3]) + ")"};
            }
        }
    }

    std::vector<char> used(vertex_count, 0);
    for (const Face& f : faces) {
        for (int v : f) used[v] = 1;
    }
    for (std::size_t v = 0; v < vertex_count; ++v) {
        if (!used[v]) return {false, "isolated vertex " + std::to_string(v)};
    }

    std::vector<std::vector<int>> loops;
    try {
        loops = boundary_loops(faces, vertex_count);
    } catch (const Error& e) {
        return {false, std::string("not manifold: ") + e.what()};
    }
    if (loops.empty()) return {false, "no boundary loop (closed surface)"};
    if (loops.size() > 1) {
        return {false, "expected one boundary loop, found " + std::to_string(loops.size())};
    }

    // Every vertex must have a single fan of faces (no pinched vertices).
    const auto vf = vertex_faces(faces, vertex_count);
    for (std::size_t v = 0; v < vertex_count; ++v) {
        // Count the connected components of the face fan around v via shared edges.
        const auto& fan = vf[v];
        std::vector<int> comp(fan.size(), -1);
        int ncomp = 0;
        for (std::size_t i = 0; i < fan.size(); ++i) {
            if (comp[i] != -1) continue;
            std::vector<std::size_t> stack{i};
            comp[i] = ncomp;
            while (!stack.empty()) {
                const std::size_t cur = stack.back();
                stack.pop_back();
                const Face& fc = faces[fan[cur]];
                for (std::size_t j = 0; j < fan.size(); ++j) {
                    if (comp[j] != -1) continue;
                    const Face& fj = faces[fan[j]];
                    int shared = 0;
                    for (int a : fc) {
                        if (a == static_cast<int>(v)) continue;
                        for (int b : fj) shared += (a == b);
                    }
                    if (shared > 0) {
                        comp[j] = ncomp;
                        stack.push_back(j);
                    }
                }
            }
            ++ncomp;
        }
        if (ncomp > 1) return {false, "non-manifold vertex " + std::to_string(v)};
    }

    const long chi = static_cast<long>(vertex_count) - static_cast<long>(adj.edges.size()) +
                     static_cast<long>(faces.size());
    if (chi != 1) {
        return {false, "Euler characteristic V - E + F = " + std::to_string(chi) + ", expected 1"};
    }
    return {};
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * cross(b - a, c - a);
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * norm(cross(b - a, c - a));
}

namespace {

double angle_between(const Vec3& u, const Vec3& v) {
    return std::atan2(norm(cross(u, v)), dot(u, v));
}

double angle_between(const Vec2& u, const Vec2& v) {
    return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

template <class Point>
std::array<double, 3> angles_of(const Point& a, const Point& b, const Point& c) {
    return {angle_between(b - a, c - a), angle_between(c - b, a - b),
            angle_between(a - c, b - c)};
}

template <class Point>
MeshQualityReport quality_report_impl(const BasicMesh<Point>& mesh) {
    MeshQualityReport r;
    r.triangle_count = mesh.faces.size();
    if (mesh.faces.empty()) return r;
    if (const int bad = find_degenerate_face(mesh); bad >= 0) {
        throw Error("degenerate face " + std::to_string(bad));
    }
    double gmin = 1e300, gmax = -1e300;
    r.face_min_angles.reserve(mesh.faces.size());
    for (const Face& f : mesh.faces) {
        const auto ang = angles_of(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
        const double lo = degrees(std::min({ang[0], ang[1], ang[2]}));
        const double hi = degrees(std::max({ang[0], ang[1], ang[2]}));
        gmin = std::min(gmin, lo);
        gmax = std::max(gmax, hi);
        r.face_min_angles.push_back(lo);
        ++r.min_angle_histogram[min_angle_bucket(lo)];
    }
    r.min_angle = gmin;
    r.max_angle = gmax;
    return r;
}

template <class Point>
double max_edge_impl(const BasicMesh<Point>& mesh) {
    double h = 0.0;
    for (const Face& f : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            h = std::max(h, distance(mesh.vertices[f[k]], mesh.vertices[f[(k + 1) % 3]]));
        }
    }
    return h;
}

}  // namespace

std::array<double, 3> triangle_angles(const Vec3& a, const Vec3& b, const Vec3& c) {
    return angles_of(a, b, c);
}

std::array<double, 3> triangle_angles(const Vec2& a, const Vec2& b, const Vec2& c) {
    return angles_of(a, b, c);
}

double bounding_diagonal(std::span<const Vec3> points) {
    if (points.empty()) return 0.0;
    Vec3 lo = points[0], hi = points[0];
    for (const Vec3& p : points) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    return norm(hi - lo);
}

double bounding_diagonal(std::span<const Vec2> points) {
    Box2 box;
    for (const Vec2& p : points) box.extend(p);
    return box.diagonal();
}

template <class Point>
Box2 bounding_box_2d(const BasicMesh<Point>& mesh) {
    Box2 box;
    for (const auto& p : mesh.vertices) box.extend({p.x, p.y});
    return box;
}

template Box2 bounding_box_2d(const TriangleMesh&);
template Box2 bounding_box_2d(const PlanarMesh&);

template <class Point>
int find_degenerate_face(const BasicMesh<Point>& mesh) {
    const double threshold = degenerate_area_threshold(mesh);
    for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
        const Face& f = mesh.faces[i];
        if (triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]) <
            threshold) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

template int find_degenerate_face(const TriangleMesh&);
template int find_degenerate_face(const PlanarMesh&);

double polygon_area(std::span<const Vec2> points, std::span<const int> loop) {
    double a = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        a += cross(points[loop[i]], points[loop[(i + 1) % loop.size()]]);
    }
    return 0.5 * a;
}

double polygon_area(std::span<const Vec2> polygon) {
    double a = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        a += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
    }
    return 0.5 * a;
}

int min_angle_bucket(double min_angle_deg) {
    if (min_angle_deg < 15.0) return 0;
    if (min_angle_deg < 30.0) return 1;
    if (min_angle_deg < 45.0) return 2;
    return 3;
}

double MeshQualityReport::fraction_at_least(double degrees_threshold) const {
    if (face_min_angles.empty()) return 0.0;
    const auto n = std::count_if(face_min_angles.begin(), face_min_angles.end(),
                                 [&](double a) { return a >= degrees_threshold; });
    return static_cast<double>(n) / static_cast<double>(face_min_angles.size());
}

MeshQualityReport quality_report(const TriangleMesh& mesh) { return quality_report_impl(mesh); }
MeshQualityReport quality_report(const PlanarMesh& mesh) { return quality_report_impl(mesh); }

std::string format_quality_report(const MeshQualityReport& r, const std::string& label) {
    std::ostringstream os;
    char buf[256];
    os << "# " << label << "\n";
    os << "Total Triangles\tMinimum Angle\tMaximum Angle\t0-15\t15-30\t30-45\t45-60\n";
    std::snprintf(buf, sizeof(buf), "%zu\t%.4f\t%.4f\t%zu\t%zu\t%zu\t%zu\n", r.triangle_count,
                  r.min_angle, r.max_angle, r.min_angle_histogram[0], r.min_angle_histogram[1],
                  r.min_angle_histogram[2], r.min_angle_histogram[3]);
    os << buf;
    std::snprintf(buf, sizeof(buf), "fraction >= 30 deg: %.4f\nfraction >= 45 deg: %.4f\n",
                  r.fraction_at_least(30.0), r.fraction_at_least(45.0));
    os << buf;
    return os.str();
}

double max_edge_length(const TriangleMesh& mesh) { return max_edge_impl(mesh); }
double max_edge_length(const PlanarMesh& mesh) { return max_edge_impl(mesh); }

PlanarMesh to_planar(const TriangleMesh& mesh) {
    PlanarMesh out;
    out.vertices.reserve(mesh.vertices.size());
    for (const Vec3& p : mesh.vertices) out.vertices.push_back({p.x, p.y});
    out.faces = mesh.faces;
    out.boundary_loop = mesh.boundary_loop;
    out.param = mesh.param;
    return out;
}

TriangleMesh to_spatial(const PlanarMesh& mesh) {
    TriangleMesh out;
    out.vertices.reserve(mesh.vertices.size());
    for (const Vec2& p : mesh.vertices) out.vertices.push_back({p.x, p.y, 0.0});
    out.faces = mesh.faces;
    out.boundary_loop = mesh.boundary_loop;
    out.param = mesh.param;
    return out;
}

}  // namespace bubblemesh
