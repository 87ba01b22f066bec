#include "bubblemesh/delaunay.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <utility>

#include "bubblemesh/predicates.hpp"

namespace bubblemesh {

namespace {

using predicates::incircle;
using predicates::orient2d;

// Hilbert index of (x, y) on a 2^16 grid.
std::uint64_t hilbert_key(std::uint32_t x, std::uint32_t y) {
    constexpr std::uint32_t n = 1u << 16;
    std::uint64_t d = 0;
    for (std::uint32_t s = n / 2; s > 0; s /= 2) {
        const std::uint32_t rx = (x & s) ? 1 : 0;
        const std::uint32_t ry = (y & s) ? 1 : 0;
        d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
        if (ry == 0) {
            if (rx == 1) {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::swap(x, y);
        }
    }
    return d;
}

class Triangulator {
public:
    struct Tri {
        std::array<int, 3> v;
        std::array<int, 3> nb;  // neighbour across the edge opposite v[k]
        bool alive = true;
    };

    explicit Triangulator(std::span<const Vec2> points) : pts_(points.begin(), points.end()) {
        n_real_ = static_cast<int>(pts_.size());
        if (n_real_ < 3) throw Error("triangulation needs at least three points");
        Box2 box;
        for (const Vec2& p : pts_) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error("non-finite point");
            box.extend(p);
        }
        const double d = std::max({box.width(), box.height(), 1e-300});
        const Vec2 c = (box.lo + box.hi) * 0.5;
        const double m = 1e3 * d;
        pts_.push_back(c + Vec2{-m, -m});
        pts_.push_back(c + Vec2{m, -m});
        pts_.push_back(c + Vec2{0.0, m});
        tris_.push_back({{n_real_, n_real_ + 1, n_real_ + 2}, {-1, -1, -1}, true});
        vtri_.assign(pts_.size(), -1);
        for (int k = 0; k < 3; ++k) vtri_[n_real_ + k] = 0;
        inserted_.assign(n_real_, false);

        // Spatially coherent insertion order.
        std::vector<std::pair<std::uint64_t, int>> order(n_real_);
        const double sx = box.width() > 0 ? 65535.0 / box.width() : 0.0;
        const double sy = box.height() > 0 ? 65535.0 / box.height() : 0.0;
        for (int i = 0; i < n_real_; ++i) {
            const auto qx = static_cast<std::uint32_t>((pts_[i].x - box.lo.x) * sx);
            const auto qy = static_cast<std::uint32_t>((pts_[i].y - box.lo.y) * sy);
            order[i] = {hilbert_key(qx, qy), i};
        }
        std::sort(order.begin(), order.end());
        for (const auto& [key, i] : order) insert(i);
    }

    bool is_super(int v) const { return v >= n_real_; }
    const std::vector<Tri>& tris() const { return tris_; }
    const std::vector<Vec2>& points() const { return pts_; }
    bool inserted(int v) const { return inserted_[v]; }

    void insert_constraint(int a, int b);
    void restore_delaunay();
    bool is_constrained(int a, int b) const {
        return constrained_.count({std::min(a, b), std::max(a, b)}) != 0;
    }

private:
    int locate(int p) const;
    void insert(int p);
    void replace_neighbor(int t, int old_nb, int new_nb) {
        if (t < 0) return;
        for (int k = 0; k < 3; ++k) {
            if (tris_[t].nb[k] == old_nb) {
                tris_[t].nb[k] = new_nb;
                return;
            }
        }
    }
    static int index_of(const Tri& t, int v) {
        for (int k = 0; k < 3; ++k) {
            if (t.v[k] == v) return k;
        }
        return -1;
    }
    // Triangle holding the directed edge u -> w, or -1.
    int triangle_with_edge(int u, int w) const;
    void flip(int t1, int u, int w);

    std::vector<Vec2> pts_;
    int n_real_ = 0;
    std::vector<Tri> tris_;
    std::vector<int> vtri_;
    std::vector<bool> inserted_;
    std::vector<int> free_;
    std::vector<unsigned> mark_;
    unsigned stamp_ = 0;
    int last_ = 0;
    std::map<std::pair<int, int>, bool> constrained_;
};

int Triangulator::locate(int p) const {
    const Vec2& q = pts_[p];
    int t = last_;
    int start = 0;
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
        const Tri& tri = tris_[t];
        bool moved = false;
        for (int s = 0; s < 3; ++s) {
            const int e = (start + s) % 3;
            const int a = tri.v[(e + 1) % 3], b = tri.v[(e + 2) % 3];
            if (orient2d(pts_[a], pts_[b], q) < 0) {
                t = tri.nb[e];
                start = (start + 1) % 3;  // vary the starting edge to avoid cycles
                moved = true;
                break;
            }
        }
        if (!moved) return t;
        if (t < 0) throw Error("point outside the triangulation");
    }
    // Fall back to a linear scan.
    for (std::size_t i = 0; i < tris_.size(); ++i) {
        const Tri& tri = tris_[i];
        if (!tri.alive) continue;
        bool inside = true;
        for (int e = 0; e < 3 && inside; ++e) {
            inside = orient2d(pts_[tri.v[(e + 1) % 3]], pts_[tri.v[(e + 2) % 3]], q) >= 0;
        }
        if (inside) return static_cast<int>(i);
    }
    throw Error("point location failed");
}

void Triangulator::insert(int p) {
    const int t0 = locate(p);
    for (int v : tris_[t0].v) {
        if (pts_[v] == pts_[p]) return;  // duplicate point
    }
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size() * 2 + 16, 0);
    ++stamp_;
    const unsigned in_cavity = ++stamp_;
    const unsigned tested_out = ++stamp_;
    ++stamp_;

    std::vector<int> cavity{t0};
    mark_[t0] = in_cavity;
    struct BoundaryEdge {
        int a, b, outside;
    };
    std::vector<BoundaryEdge> boundary;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
        const int t = cavity[k];
        for (int e = 0; e < 3; ++e) {
            const int n = tris_[t].nb[e];
            const int a = tris_[t].v[(e + 1) % 3], b = tris_[t].v[(e + 2) % 3];
            if (n >= 0 && mark_[n] == in_cavity) continue;
            if (n >= 0 && mark_[n] != tested_out) {
                const Tri& nt = tris_[n];
                if (incircle(pts_[nt.v[0]], pts_[nt.v[1]], pts_[nt.v[2]], pts_[p]) > 0) {
                    mark_[n] = in_cavity;
                    cavity.push_back(n);
                    continue;
                }
                mark_[n] = tested_out;
            }
            boundary.push_back({a, b, n});
        }
    }
    // Edges whose neighbour was pulled into the cavity after being recorded.
    boundary.erase(std::remove_if(boundary.begin(), boundary.end(),
                                  [&](const BoundaryEdge& be) {
                                      return be.outside >= 0 && mark_[be.outside] == in_cavity;
                                  }),
                   boundary.end());

    for (int t : cavity) {
        tris_[t].alive = false;
        free_.push_back(t);
    }
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const BoundaryEdge& be : boundary) {
        int id;
        if (!free_.empty()) {
            id = free_.back();
            free_.pop_back();
        } else {
            id = static_cast<int>(tris_.size());
            tris_.push_back({});
            if (mark_.size() < tris_.size()) mark_.resize(tris_.size() * 2 + 16, 0);
        }
        mark_[id] = 0;
        tris_[id] = {{be.a, be.b, p}, {-1, -1, be.outside}, true};
        if (be.outside >= 0) {
            Tri& o = tris_[be.outside];
            for (int e = 0; e < 3; ++e) {
                if (o.v[(e + 1) % 3] == be.b && o.v[(e + 2) % 3] == be.a) o.nb[e] = id;
            }
        }
        vtri_[be.a] = id;
        vtri_[be.b] = id;
        created.push_back(id);
    }
    // Link the fan around p: triangle (a, b, p) meets (b, c, p) across b-p.
    for (std::size_t i = 0; i < created.size(); ++i) {
        Tri& ti = tris_[created[i]];
        for (std::size_t j = 0; j < created.size(); ++j) {
            if (i == j) continue;
            const Tri& tj = tris_[created[j]];
            if (tj.v[0] == ti.v[1]) ti.nb[0] = created[j];  // edge b -> p
            if (tj.v[1] == ti.v[0]) ti.nb[1] = created[j];  // edge p -> a
        }
    }
    vtri_[p] = created.front();
    inserted_[p] = true;
    last_ = created.front();
}

int Triangulator::triangle_with_edge(int u, int w) const {
    int t = vtri_[u];
    if (t < 0) return -1;
    const int first = t;
    do {
        const Tri& tri = tris_[t];
        const int k = index_of(tri, u);
        if (tri.v[(k + 1) % 3] == w) return t;
        t = tri.nb[(k + 1) % 3];  // rotate counterclockwise around u
    } while (t >= 0 && t != first);
    return -1;
}

void Triangulator::flip(int t1, int u, int w) {
    // t1 = (u, w, x), t2 = (w, u, y)  ->  (u, y, x), (y, w, x)
    Tri& A = tris_[t1];
    const int ku = index_of(A, u);
    const int x = A.v[(ku + 2) % 3];
    const int t2 = A.nb[(ku + 2) % 3];
    Tri& B = tris_[t2];
    const int kw = index_of(B, w);
    const int y = B.v[(kw + 2) % 3];
    const int n_wx = A.nb[ku];
    const int n_xu = A.nb[(ku + 1) % 3];
    const int n_uy = B.nb[kw];
    const int n_yw = B.nb[(kw + 1) % 3];

    tris_[t1] = {{u, y, x}, {t2, n_xu, n_uy}, true};
    tris_[t2] = {{y, w, x}, {n_wx, t1, n_yw}, true};
    replace_neighbor(n_uy, t2, t1);
    replace_neighbor(n_wx, t1, t2);
    vtri_[u] = t1;
    vtri_[x] = t1;
    vtri_[y] = t1;
    vtri_[w] = t2;
}

void Triangulator::insert_constraint(int a, int b) {
    if (a == b) return;
    constrained_[{std::min(a, b), std::max(a, b)}] = true;
    if (triangle_with_edge(a, b) >= 0 || triangle_with_edge(b, a) >= 0) return;
    const Vec2 &pa = pts_[a], &pb = pts_[b];
    auto on_segment = [&](int v) {
        const Vec2& q = pts_[v];
        return dot(q - pa, pb - pa) > 0.0 && dot(q - pb, pa - pb) > 0.0;
    };

    // Find the triangle around a that the segment leaves through.
    std::deque<std::pair<int, int>> crossing;  // (right, left) vertex pairs
    int t = vtri_[a];
    const int first = t;
    int right = -1, left = -1, through = -1;
    do {
        const Tri& tri = tris_[t];
        const int k = index_of(tri, a);
        const int p = tri.v[(k + 1) % 3], q = tri.v[(k + 2) % 3];
        const int op = orient2d(pa, pb, pts_[p]);
        const int oq = orient2d(pa, pb, pts_[q]);
        if (op == 0 && on_segment(p)) throw Error("constraint passes through a vertex");
        if (op < 0 && oq > 0) {
            right = p;
            left = q;
            through = tri.nb[k];
            break;
        }
        t = tri.nb[(k + 1) % 3];
    } while (t >= 0 && t != first);
    if (through < 0) throw Error("constraint recovery failed");

    crossing.emplace_back(right, left);
    while (true) {
        const Tri& tri = tris_[through];
        int r = -1;
        for (int v : tri.v) {
            if (v != right && v != left) r = v;
        }
        if (r == b) break;
        const int o = orient2d(pa, pb, pts_[r]);
        if (o == 0) throw Error("constraint passes through a vertex");
        if (o > 0) {
            // Next crossed edge is (right, r); leave across the edge opposite left.
            through = tri.nb[index_of(tri, left)];
            left = r;
        } else {
            through = tri.nb[index_of(tri, right)];
            right = r;
        }
        if (through < 0) throw Error("constraint recovery failed");
        crossing.emplace_back(right, left);
    }

    // Flip crossing edges until none remain.
    std::size_t guard = 0;
    const std::size_t limit = 100 * (crossing.size() + 1) * (crossing.size() + 1);
    while (!crossing.empty()) {
        if (++guard > limit) throw Error("constraint recovery did not terminate");
        auto [u, w] = crossing.front();
        crossing.pop_front();
        const int t1 = triangle_with_edge(u, w);
        if (t1 < 0) continue;
        const Tri& A = tris_[t1];
        const int ku = index_of(A, u);
        const int x = A.v[(ku + 2) % 3];
        const Tri& B = tris_[A.nb[(ku + 2) % 3]];
        const int y = B.v[(index_of(B, w) + 2) % 3];
        const int s1 = orient2d(pts_[x], pts_[y], pts_[u]);
        const int s2 = orient2d(pts_[x], pts_[y], pts_[w]);
        if (s1 == 0 || s2 == 0 || s1 == s2) {
            crossing.emplace_back(u, w);  // quad not strictly convex yet
            continue;
        }
        flip(t1, u, w);
        const bool shares = x == a || x == b || y == a || y == b;
        if (!shares) {
            const int ox = orient2d(pa, pb, pts_[x]);
            const int oy = orient2d(pa, pb, pts_[y]);
            if (ox != 0 && oy != 0 && ox != oy) {
                const int ab = orient2d(pts_[x], pts_[y], pa);
                const int bb = orient2d(pts_[x], pts_[y], pb);
                if (ab != 0 && bb != 0 && ab != bb) crossing.emplace_back(x, y);
            }
        }
    }
}

void Triangulator::restore_delaunay() {
    std::vector<std::pair<int, int>> stack;
    for (const Tri& tri : tris_) {
        if (!tri.alive) continue;
        for (int e = 0; e < 3; ++e) stack.emplace_back(tri.v[(e + 1) % 3], tri.v[(e + 2) % 3]);
    }
    std::size_t guard = 0;
    while (!stack.empty()) {
        if (++guard > 1000000 + 100 * tris_.size()) throw Error("Delaunay restoration did not terminate");
        auto [u, w] = stack.back();
        stack.pop_back();
        if (is_constrained(u, w)) continue;
        const int t1 = triangle_with_edge(u, w);
        if (t1 < 0) continue;
        const Tri& A = tris_[t1];
        const int ku = index_of(A, u);
        const int t2 = A.nb[(ku + 2) % 3];
        if (t2 < 0) continue;
        const int x = A.v[(ku + 2) % 3];
        const Tri& B = tris_[t2];
        const int y = B.v[(index_of(B, w) + 2) % 3];
        if (incircle(pts_[u], pts_[w], pts_[x], pts_[y]) <= 0) continue;
        const int s1 = orient2d(pts_[x], pts_[y], pts_[u]);
        const int s2 = orient2d(pts_[x], pts_[y], pts_[w]);
        if (s1 == 0 || s2 == 0 || s1 == s2) continue;
        flip(t1, u, w);
        stack.emplace_back(u, y);
        stack.emplace_back(y, w);
        stack.emplace_back(w, x);
        stack.emplace_back(x, u);
    }
}

std::vector<Face> canonical_faces(std::vector<Face> faces) {
    for (Face& f : faces) {
        const int k = static_cast<int>(std::min_element(f.begin(), f.end()) - f.begin());
        std::rotate(f.begin(), f.begin() + k, f.end());
    }
    std::sort(faces.begin(), faces.end());
    return faces;
}

PlanarMesh build_mesh(std::span<const Vec2> points, const Triangulator& tr,
                      const std::function<bool(const Face&)>& keep) {
    PlanarMesh mesh;
    mesh.vertices.assign(points.begin(), points.end());
    std::vector<Face> faces;
    for (const auto& tri : tr.tris()) {
        if (!tri.alive) continue;
        if (tr.is_super(tri.v[0]) || tr.is_super(tri.v[1]) || tr.is_super(tri.v[2])) continue;
        if (keep && !keep(tri.v)) continue;
        faces.push_back(tri.v);
    }
    mesh.faces = canonical_faces(std::move(faces));
    return mesh;
}

}  // namespace

PlanarMesh delaunay_triangulate(std::span<const Vec2> points) {
    Triangulator tr(points);
    PlanarMesh mesh = build_mesh(points, tr, {});
    if (mesh.faces.empty()) throw Error("all points are collinear");
    try {
        assign_boundary_loop(mesh);
    } catch (const Error&) {
        mesh.boundary_loop.clear();
    }
    return mesh;
}

std::vector<std::vector<int>> bubble_boundary_loops(std::span<const Bubble> bubbles) {
    std::map<int, std::vector<int>> by_loop;
    for (std::size_t i = 0; i < bubbles.size(); ++i) {
        if (bubbles[i].kind == BubbleKind::Boundary) {
            by_loop[std::max(bubbles[i].loop, 0)].push_back(static_cast<int>(i));
        }
    }
    std::vector<std::vector<int>> loops;
    for (auto& [k, l] : by_loop) loops.push_back(std::move(l));
    return loops;
}

PlanarMesh delaunay_triangulate(std::span<const Bubble> bubbles) {
    std::vector<Vec2> points;
    points.reserve(bubbles.size());
    for (const Bubble& b : bubbles) points.push_back(b.center);
    Triangulator tr(points);

    const auto loops = bubble_boundary_loops(bubbles);
    if (loops.empty()) {
        PlanarMesh mesh = build_mesh(points, tr, {});
        if (mesh.faces.empty()) throw Error("all points are collinear");
        try {
            assign_boundary_loop(mesh);
        } catch (const Error&) {
            mesh.boundary_loop.clear();
        }
        return mesh;
    }

    for (const auto& loop : loops) {
        if (loop.size() < 3) throw Error("boundary loop with fewer than three bubbles");
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const int a = loop[i], b = loop[(i + 1) % loop.size()];
            if (!tr.inserted(a) || !tr.inserted(b)) throw Error("coincident boundary bubbles");
            tr.insert_constraint(a, b);
        }
    }
    tr.restore_delaunay();

    // Region test against the boundary polygons.
    PackingDomain region;
    for (std::size_t k = 0; k < loops.size(); ++k) {
        Polygon poly;
        for (int i : loops[k]) poly.push_back(points[i]);
        if (k == 0) {
            region.outer = std::move(poly);
        } else {
            region.holes.push_back(std::move(poly));
        }
    }
    const DomainIndex index(region);
    PlanarMesh mesh = build_mesh(points, tr, [&](const Face& f) {
        const Vec2 c = (points[f[0]] + points[f[1]] + points[f[2]]) / 3.0;
        return index.contains(c);
    });
    if (mesh.faces.empty()) throw Error("triangulation of the bubble set is empty");

    // The outer loop is the boundary loop; holes add further boundary loops.
    mesh.boundary_loop = loops.front();
    if (polygon_area(mesh.vertices, mesh.boundary_loop) < 0.0) {
        std::reverse(mesh.boundary_loop.begin(), mesh.boundary_loop.end());
    }
    return mesh;
}

std::vector<int> remove_unreferenced_vertices(PlanarMesh& mesh) {
    std::vector<int> remap(mesh.vertices.size(), -1);
    for (const Face& f : mesh.faces) {
        for (int v : f) remap[v] = 0;
    }
    std::vector<Vec2> vertices;
    std::vector<Vec2> param;
    for (std::size_t i = 0; i < remap.size(); ++i) {
        if (remap[i] < 0) continue;
        remap[i] = static_cast<int>(vertices.size());
        vertices.push_back(mesh.vertices[i]);
        if (mesh.has_param()) param.push_back(mesh.param[i]);
    }
    for (Face& f : mesh.faces) {
        for (int& v : f) v = remap[v];
    }
    std::vector<int> loop;
    for (int v : mesh.boundary_loop) {
        if (remap[v] >= 0) loop.push_back(remap[v]);
    }
    mesh.boundary_loop = std::move(loop);
    mesh.vertices = std::move(vertices);
    mesh.param = std::move(param);
    return remap;
}

}  // namespace bubblemesh
