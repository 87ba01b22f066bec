#include "bubblemesh/sizing.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace bubblemesh {

namespace {

constexpr double kRegularityTol = 1e-14;

Vec3 unit_normal(const SurfaceJet& j) {
    const Vec3 n = cross(j.fu, j.fv);
    const double len = norm(n);
    if (!(len > kRegularityTol)) throw Error("irregular surface point (f_u x f_v = 0)");
    return n / len;
}

}  // namespace

void SizingParams::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0 / 1.2)) {
        throw Error("epsilon must lie in (0, 1/1.2), got " + std::to_string(epsilon));
    }
    if (!(r_min > 0.0) || !(r_max >= r_min)) {
        throw Error("radius clamp requires 0 < r_min <= r_max");
    }
}

double g_of_eps(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0 / 1.2)) {
        throw Error("epsilon must lie in (0, 1/1.2), got " + std::to_string(epsilon));
    }
    return (1.0 - epsilon) * std::sqrt(40.0 * (1.0 - std::sqrt(1.0 - 1.2 * epsilon)));
}

std::pair<double, double> principal_curvatures(const ParametricSurface& surface, double u,
                                               double v) {
    const SurfaceJet j = surface.jet(u, v);
    const Vec3 n = unit_normal(j);
    const double E = dot(j.fu, j.fu), F = dot(j.fu, j.fv), G = dot(j.fv, j.fv);
    const double L = dot(j.fuu, n), M = dot(j.fuv, n), N = dot(j.fvv, n);
    // Second fundamental form in an orthonormal tangent frame; hypot keeps
    // umbilic points accurate where sqrt(H^2 - K) would not.
    const double su = std::sqrt(E);
    const double h = std::sqrt((E * G - F * F) / E);
    const double p = -F / (E * h), q = 1.0 / h;  // e2 = p fu + q fv
    const double a = L / E;
    const double b = (L * p + M * q) / su;
    const double c = L * p * p + 2.0 * M * p * q + N * q * q;
    const double mean = 0.5 * (a + c);
    const double half = std::hypot(0.5 * (a - c), b);
    return {mean + half, mean - half};
}

double max_normal_curvature(const ParametricSurface& surface, double u, double v) {
    const auto [k1, k2] = principal_curvatures(surface, u, v);
    return std::max(std::abs(k1), std::abs(k2));
}

double allowable_edge_3d(const ParametricSurface& surface, double u, double v,
                         const SizingParams& params) {
    const double kappa = max_normal_curvature(surface, u, v);
    const double g = g_of_eps(params.epsilon);
    if (kappa <= 0.0) return std::numeric_limits<double>::infinity();
    return g / kappa;
}

double sigma1(const ParametricSurface& surface, double u, double v) {
    const SurfaceJet j = surface.jet(u, v);
    unit_normal(j);  // regularity check
    Eigen::Matrix<double, 3, 2> J;
    J << j.fu.x, j.fv.x, j.fu.y, j.fv.y, j.fu.z, j.fv.z;
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(J);
    return svd.singularValues()(0);
}

double radius_bound(const ParametricSurface& surface, double u, double v,
                    const SizingParams& params) {
    const double lp = allowable_edge_3d(surface, u, v, params);
    const double lp_param = lp / sigma1(surface, u, v);
    return std::clamp(lp_param, 2.0 * params.r_min, 2.0 * params.r_max) / 2.0;
}

std::function<double(const Vec2&)> make_radius_bound(const ParametricSurface& surface,
                                                     const SizingParams& params) {
    params.validate();
    const ParamDomain d = surface.domain();
    return [&surface, params, d](const Vec2& p) {
        const double u = std::clamp(p.x, d.u0, d.u1);
        const double v = std::clamp(p.y, d.v0, d.v1);
        return radius_bound(surface, u, v, params);
    };
}

double hausdorff_estimate(const TriangleMesh& mesh, const ParametricSurface& surface,
                          int sample_density) {
    if (!mesh.has_param()) throw Error("mesh lacks stored parametric coordinates");
    if (sample_density < 1) throw Error("sample_density must be >= 1");
    const int n = sample_density;
    double worst = 0.0;
    for (const Face& f : mesh.faces) {
        const Vec3& a = mesh.vertices[f[0]];
        const Vec3& b = mesh.vertices[f[1]];
        const Vec3& c = mesh.vertices[f[2]];
        const Vec2& ua = mesh.param[f[0]];
        const Vec2& ub = mesh.param[f[1]];
        const Vec2& uc = mesh.param[f[2]];
        // Union of the lattices 1..n keeps the estimate monotone in n.
        for (int m = 1; m <= n; ++m) {
            for (int i = 0; i <= m; ++i) {
                for (int k = 0; k <= m - i; ++k) {
                    const double l1 = static_cast<double>(i) / m;
                    const double l2 = static_cast<double>(k) / m;
                    const double l0 = 1.0 - l1 - l2;
                    const Vec3 flat = a * l0 + b * l1 + c * l2;
                    const Vec2 uv = ua * l0 + ub * l1 + uc * l2;
                    worst = std::max(worst, distance(flat, surface.position(uv.x, uv.y)));
                }
            }
        }
    }
    return worst;
}

}  // namespace bubblemesh
