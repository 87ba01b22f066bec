#pragma once

#include <map>
#include <memory>
#include <string>

#include "bubblemesh/geometry.hpp"

namespace bubblemesh {

struct ParamDomain {
    double u0 = 0.0, u1 = 1.0;
    double v0 = 0.0, v1 = 1.0;

    bool contains(double u, double v, double tol = 1e-12) const {
        return u >= u0 - tol && u <= u1 + tol && v >= v0 - tol && v <= v1 + tol;
    }
};

/// Position and analytic partial derivatives of the surface map at (u, v).
struct SurfaceJet {
    Vec3 position;
    Vec3 fu, fv;
    Vec3 fuu, fuv, fvv;
};

/// Regular map from a parameter rectangle into R^3.
class ParametricSurface {
public:
    explicit ParametricSurface(ParamDomain domain) : domain_(domain) {}
    virtual ~ParametricSurface() = default;

    const ParamDomain& domain() const { return domain_; }
    virtual std::string name() const = 0;
    virtual SurfaceJet jet(double u, double v) const = 0;
    virtual Vec3 position(double u, double v) const { return jet(u, v).position; }

private:
    ParamDomain domain_;
};

/// f(u, v) = (su * u, sv * v, 0).
class PlaneSurface final : public ParametricSurface {
public:
    PlaneSurface(ParamDomain domain, double su = 1.0, double sv = 1.0)
        : ParametricSurface(domain), su_(su), sv_(sv) {}
    std::string name() const override { return "plane"; }
    SurfaceJet jet(double u, double v) const override;

private:
    double su_, sv_;
};

/// Longitude/latitude patch: f = R (cos v cos u, cos v sin u, sin v).
class SpherePatch final : public ParametricSurface {
public:
    SpherePatch(ParamDomain domain, double radius) : ParametricSurface(domain), radius_(radius) {}
    std::string name() const override { return "sphere"; }
    SurfaceJet jet(double u, double v) const override;
    double radius() const { return radius_; }

private:
    double radius_;
};

/// f = (R cos u, R sin u, v).
class CylinderPatch final : public ParametricSurface {
public:
    CylinderPatch(ParamDomain domain, double radius) : ParametricSurface(domain), radius_(radius) {}
    std::string name() const override { return "cylinder"; }
    SurfaceJet jet(double u, double v) const override;
    double radius() const { return radius_; }

private:
    double radius_;
};

/// f = ((R + r cos v) cos u, (R + r cos v) sin u, r sin v).
class TorusPatch final : public ParametricSurface {
public:
    TorusPatch(ParamDomain domain, double major, double minor)
        : ParametricSurface(domain), major_(major), minor_(minor) {}
    std::string name() const override { return "torus"; }
    SurfaceJet jet(double u, double v) const override;

private:
    double major_, minor_;
};

/// Graph z = A sin(a u) cos(b v).
class WavySurface final : public ParametricSurface {
public:
    WavySurface(ParamDomain domain, double amplitude, double a, double b)
        : ParametricSurface(domain), amp_(amplitude), a_(a), b_(b) {}
    std::string name() const override { return "wavy"; }
    SurfaceJet jet(double u, double v) const override;

private:
    double amp_, a_, b_;
};

/// Builds a catalog surface from a name and numeric parameters:
///   plane:    u0 u1 v0 v1 [su sv]
///   sphere:   u0 u1 v0 v1 radius
///   cylinder: u0 u1 v0 v1 radius
///   torus:    u0 u1 v0 v1 major minor
///   wavy:     u0 u1 v0 v1 amplitude a b
std::unique_ptr<ParametricSurface> make_surface(const std::string& name,
                                                const std::map<std::string, double>& params);

}  // namespace bubblemesh
