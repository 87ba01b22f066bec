#pragma once

#include <functional>
#include <limits>

#include "bubblemesh/mesh.hpp"
#include "bubblemesh/surface.hpp"

namespace bubblemesh {

/// Chord-error tolerance and the radius clamp applied to the sizing field.
struct SizingParams {
    double epsilon = 0.01;
    double r_min = 0.01;
    double r_max = 0.5;

    void validate() const;
};

/// Edge-length factor g(eps) = (1 - eps) sqrt(40 (1 - sqrt(1 - 1.2 eps))).
/// The longest admissible chord under curvature kappa is g(eps) / kappa.
double g_of_eps(double epsilon);

/// max(|k1|, |k2|) from the first and second fundamental forms at (u, v).
double max_normal_curvature(const ParametricSurface& surface, double u, double v);

/// Principal curvatures (k1 >= k2), signed with respect to f_u x f_v.
std::pair<double, double> principal_curvatures(const ParametricSurface& surface, double u, double v);

/// Longest admissible edge in R^3 at (u, v); +infinity where the surface is flat.
double allowable_edge_3d(const ParametricSurface& surface, double u, double v,
                         const SizingParams& params);

/// Largest singular value of the 3x2 Jacobian (f_u, f_v).
double sigma1(const ParametricSurface& surface, double u, double v);

/// Bubble radius bound in parameter units: clamp(l_p / sigma1, 2 r_min, 2 r_max) / 2.
double radius_bound(const ParametricSurface& surface, double u, double v,
                    const SizingParams& params);

/// Point-wise radius bound as a callable over the parameter plane.
std::function<double(const Vec2&)> make_radius_bound(const ParametricSurface& surface,
                                                     const SizingParams& params);

/// One-sided distance estimate between a mesh built on `surface` and the
/// surface itself: for `sample_density` = n, every face is sampled on the
/// barycentric lattices (i, j, k) / m, m = 1..n, and each sample's flat position
/// is compared with the surface position at the interpolated parametric
/// coordinates.
/// Requires stored parametric coordinates.
double hausdorff_estimate(const TriangleMesh& mesh, const ParametricSurface& surface,
                          int sample_density);

}  // namespace bubblemesh
