#include "bubblemesh/locate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bubblemesh/predicates.hpp"

namespace bubblemesh {

std::array<double, 3> barycentric(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
    const double total = signed_area(a, b, c);
    if (total == 0.0) throw Error("barycentric coordinates of a degenerate triangle");
    std::array<double, 3> l{signed_area(p, b, c) / total, signed_area(a, p, c) / total,
                            signed_area(a, b, p) / total};
    double sum = 0.0;
    for (double& x : l) {
        x = std::max(x, 0.0);
        sum += x;
    }
    if (sum <= 0.0) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    for (double& x : l) x /= sum;
    return l;
}

PointLocator::PointLocator(const PlanarMesh& mesh) : mesh_(&mesh) {
    if (mesh.faces.empty()) throw Error("point location needs a non-empty mesh");
    for (const Face& f : mesh.faces) {
        for (int v : f) box_.extend(mesh.vertices[v]);
    }
    snap_ = 1e-9 * box_.diagonal();
    const double area = std::max(box_.width() * box_.height(), 1e-300);
    cell_ = std::sqrt(area / static_cast<double>(mesh.faces.size())) * 1.5;
    if (!(cell_ > 0.0)) cell_ = std::max(box_.diagonal(), 1.0);
    nx_ = std::clamp(static_cast<int>(box_.width() / cell_) + 1, 1, 4096);
    ny_ = std::clamp(static_cast<int>(box_.height() / cell_) + 1, 1, 4096);
    cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    auto cx = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - box_.lo.x) / cell_)), 0, nx_ - 1); };
    auto cy = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - box_.lo.y) / cell_)), 0, ny_ - 1); };
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        Box2 fb;
        for (int v : mesh.faces[f]) fb.extend(mesh.vertices[v]);
        for (int j = cy(fb.lo.y - snap_); j <= cy(fb.hi.y + snap_); ++j) {
            for (int i = cx(fb.lo.x - snap_); i <= cx(fb.hi.x + snap_); ++i) {
                cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(f));
            }
        }
    }
}

std::optional<BarycentricLocation> PointLocator::try_locate(const Vec2& p) const {
    if (p.x < box_.lo.x - snap_ || p.x > box_.hi.x + snap_ || p.y < box_.lo.y - snap_ ||
        p.y > box_.hi.y + snap_) {
        return std::nullopt;
    }
    const int i = std::clamp(static_cast<int>(std::floor((p.x - box_.lo.x) / cell_)), 0, nx_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p.y - box_.lo.y) / cell_)), 0, ny_ - 1);
    const auto& cand = cells_[static_cast<std::size_t>(j) * nx_ + i];  // ascending face order

    const auto& V = mesh_->vertices;
    for (int f : cand) {
        const Face& face = mesh_->faces[f];
        const Vec2 &a = V[face[0]], &b = V[face[1]], &c = V[face[2]];
        const int s = predicates::orient2d(a, b, c);
        if (s == 0) continue;
        if (predicates::orient2d(a, b, p) * s >= 0 && predicates::orient2d(b, c, p) * s >= 0 &&
            predicates::orient2d(c, a, p) * s >= 0) {
            return BarycentricLocation{f, barycentric(p, a, b, c)};
        }
    }
    // Snap: the face whose closest point is nearest, if within tolerance.
    double best = std::numeric_limits<double>::infinity();
    int best_face = -1;
    for (int f : cand) {
        const Face& face = mesh_->faces[f];
        double worst = 0.0;
        for (int e = 0; e < 3; ++e) {
            const Vec2& a = V[face[e]];
            const Vec2& b = V[face[(e + 1) % 3]];
            const Vec2& c = V[face[(e + 2) % 3]];
            const double len = distance(a, b);
            if (len == 0.0) continue;
            // Signed distance of p outside edge (a, b), relative to c's side.
            const double side = signed_area(a, b, c) > 0 ? 1.0 : -1.0;
            const double d = -side * 2.0 * signed_area(a, b, p) / len;
            worst = std::max(worst, d);
        }
        if (worst < best) {
            best = worst;
            best_face = f;
        }
    }
    if (best_face < 0 || best > snap_) return std::nullopt;
    const Face& face = mesh_->faces[best_face];
    return BarycentricLocation{best_face, barycentric(p, V[face[0]], V[face[1]], V[face[2]])};
}

BarycentricLocation PointLocator::locate(const Vec2& p) const {
    auto loc = try_locate(p);
    if (!loc) throw Error("outside flattened domain");
    return *loc;
}

BarycentricLocation locate(const PlanarMesh& mesh, const Vec2& p) {
    return PointLocator(mesh).locate(p);
}

TriangleMesh inverse_map(const PlanarMesh& new_flat, const PlanarMesh& initial_flat,
                         const TriangleMesh& initial_surface) {
    if (initial_flat.vertices.size() != initial_surface.vertices.size() ||
        initial_flat.faces != initial_surface.faces) {
        throw Error("initial flat mesh and surface do not share connectivity");
    }
    const PointLocator locator(initial_flat);
    const bool with_param = initial_surface.has_param();
    TriangleMesh out;
    out.faces = new_flat.faces;
    out.boundary_loop = new_flat.boundary_loop;
    out.vertices.reserve(new_flat.vertices.size());
    std::vector<int> failed;
    for (std::size_t k = 0; k < new_flat.vertices.size(); ++k) {
        const auto loc = locator.try_locate(new_flat.vertices[k]);
        if (!loc) {
            failed.push_back(static_cast<int>(k));
            out.vertices.push_back({});
            if (with_param) out.param.push_back({});
            continue;
        }
        const Face& f = initial_surface.faces[loc->face];
        const auto& l = loc->lambda;
        // Exact vertex hits reproduce the vertex bit for bit.
        int hit = -1;
        for (int c = 0; c < 3; ++c) {
            if (l[c] == 1.0) hit = c;
        }
        if (hit >= 0) {
            out.vertices.push_back(initial_surface.vertices[f[hit]]);
            if (with_param) out.param.push_back(initial_surface.param[f[hit]]);
            continue;
        }
        const auto& S = initial_surface.vertices;
        out.vertices.push_back(S[f[0]] * l[0] + S[f[1]] * l[1] + S[f[2]] * l[2]);
        if (with_param) {
            const auto& P = initial_surface.param;
            out.param.push_back(P[f[0]] * l[0] + P[f[1]] * l[1] + P[f[2]] * l[2]);
        }
    }
    if (!failed.empty()) {
        std::string msg = "cannot locate " + std::to_string(failed.size()) + " vertices in the flattened domain:";
        for (std::size_t i = 0; i < std::min<std::size_t>(failed.size(), 10); ++i) {
            msg += " " + std::to_string(failed[i]);
        }
        if (failed.size() > 10) msg += " ...";
        throw Error(msg);
    }
    return out;
}

}  // namespace bubblemesh
