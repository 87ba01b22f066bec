#include "bubblemesh/surface.hpp"

#include <cmath>

namespace bubblemesh {

SurfaceJet PlaneSurface::jet(double u, double v) const {
    SurfaceJet j;
    j.position = {su_ * u, sv_ * v, 0.0};
    j.fu = {su_, 0.0, 0.0};
    j.fv = {0.0, sv_, 0.0};
    return j;
}

SurfaceJet SpherePatch::jet(double u, double v) const {
    const double R = radius_;
    const double cu = std::cos(u), su = std::sin(u);
    const double cv = std::cos(v), sv = std::sin(v);
    SurfaceJet j;
    j.position = {R * cv * cu, R * cv * su, R * sv};
    j.fu = {-R * cv * su, R * cv * cu, 0.0};
    j.fv = {-R * sv * cu, -R * sv * su, R * cv};
    j.fuu = {-R * cv * cu, -R * cv * su, 0.0};
    j.fuv = {R * sv * su, -R * sv * cu, 0.0};
    j.fvv = {-R * cv * cu, -R * cv * su, -R * sv};
    return j;
}

SurfaceJet CylinderPatch::jet(double u, double v) const {
    const double R = radius_;
    const double cu = std::cos(u), su = std::sin(u);
    SurfaceJet j;
    j.position = {R * cu, R * su, v};
    j.fu = {-R * su, R * cu, 0.0};
    j.fv = {0.0, 0.0, 1.0};
    j.fuu = {-R * cu, -R * su, 0.0};
    return j;
}

SurfaceJet TorusPatch::jet(double u, double v) const {
    const double R = major_, r = minor_;
    const double cu = std::cos(u), su = std::sin(u);
    const double cv = std::cos(v), sv = std::sin(v);
    const double w = R + r * cv;
    SurfaceJet j;
    j.position = {w * cu, w * su, r * sv};
    j.fu = {-w * su, w * cu, 0.0};
    j.fv = {-r * sv * cu, -r * sv * su, r * cv};
    j.fuu = {-w * cu, -w * su, 0.0};
    j.fuv = {r * sv * su, -r * sv * cu, 0.0};
    j.fvv = {-r * cv * cu, -r * cv * su, -r * sv};
    return j;
}

SurfaceJet WavySurface::jet(double u, double v) const {
    const double sa = std::sin(a_ * u), ca = std::cos(a_ * u);
    const double sb = std::sin(b_ * v), cb = std::cos(b_ * v);
    SurfaceJet j;
    j.position = {u, v, amp_ * sa * cb};
    j.fu = {1.0, 0.0, amp_ * a_ * ca * cb};
    j.fv = {0.0, 1.0, -amp_ * b_ * sa * sb};
    j.fuu = {0.0, 0.0, -amp_ * a_ * a_ * sa * cb};
    j.fuv = {0.0, 0.0, -amp_ * a_ * b_ * ca * sb};
    j.fvv = {0.0, 0.0, -amp_ * b_ * b_ * sa * cb};
    return j;
}

namespace {

double get(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

}  // namespace

std::unique_ptr<ParametricSurface> make_surface(const std::string& name,
                                                const std::map<std::string, double>& p) {
    ParamDomain d{get(p, "u0", 0.0), get(p, "u1", 1.0), get(p, "v0", 0.0), get(p, "v1", 1.0)};
    if (!(d.u1 > d.u0) || !(d.v1 > d.v0)) throw Error("empty parameter domain");
    if (name == "plane") {
        return std::make_unique<PlaneSurface>(d, get(p, "su", 1.0), get(p, "sv", 1.0));
    }
    if (name == "sphere") return std::make_unique<SpherePatch>(d, get(p, "radius", 1.0));
    if (name == "cylinder") return std::make_unique<CylinderPatch>(d, get(p, "radius", 1.0));
    if (name == "torus") {
        return std::make_unique<TorusPatch>(d, get(p, "major", 2.0), get(p, "minor", 0.5));
    }
    if (name == "wavy") {
        return std::make_unique<WavySurface>(d, get(p, "amplitude", 0.3), get(p, "a", 2.0),
                                             get(p, "b", 2.0));
    }
    throw Error("unknown surface '" + name + "'");
}

}  // namespace bubblemesh
