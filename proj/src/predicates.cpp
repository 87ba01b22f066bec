#include "bubblemesh/predicates.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <vector>

namespace bubblemesh::predicates {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

std::atomic<long> g_fallbacks{0};

// Nonoverlapping floating-point expansions, components in increasing
// magnitude, zeros dropped. The value is the exact sum of the components.
using Expansion = std::vector<double>;

void two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    const double bv = x - a;
    const double av = x - bv;
    y = (a - av) + (b - bv);
}

void fast_two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    y = b - (x - a);
}

Expansion from_diff(double a, double b) {
    const double x = a - b;
    const double bv = a - x;
    const double av = x + bv;
    const double y = (a - av) + (bv - b);
    Expansion e;
    if (y != 0.0) e.push_back(y);
    if (x != 0.0) e.push_back(x);
    return e;
}

Expansion sum(const Expansion& e, const Expansion& f) {
    if (e.empty()) return f;
    if (f.empty()) return e;
    Expansion h;
    h.reserve(e.size() + f.size());
    std::size_t i = 0, j = 0;
    auto next = [&]() {
        return (j >= f.size() || (i < e.size() && std::fabs(e[i]) < std::fabs(f[j]))) ? e[i++] : f[j++];
    };
    double q = next();
    if (i + j < e.size() + f.size()) {
        double hh;
        double qn;
        fast_two_sum(next(), q, qn, hh);
        q = qn;
        if (hh != 0.0) h.push_back(hh);
        while (i + j < e.size() + f.size()) {
            two_sum(q, next(), qn, hh);
            q = qn;
            if (hh != 0.0) h.push_back(hh);
        }
    }
    if (q != 0.0 || h.empty()) h.push_back(q);
    if (h.size() == 1 && h[0] == 0.0) h.clear();
    return h;
}

Expansion scale(const Expansion& e, double b) {
    Expansion h;
    if (e.empty() || b == 0.0) return h;
    h.reserve(2 * e.size());
    double q = e[0] * b;
    double lo = std::fma(e[0], b, -q);
    if (lo != 0.0) h.push_back(lo);
    for (std::size_t i = 1; i < e.size(); ++i) {
        const double p = e[i] * b;
        const double pl = std::fma(e[i], b, -p);
        double s, hh;
        two_sum(q, pl, s, hh);
        if (hh != 0.0) h.push_back(hh);
        fast_two_sum(p, s, q, hh);
        if (hh != 0.0) h.push_back(hh);
    }
    if (q != 0.0) h.push_back(q);
    return h;
}

Expansion product(const Expansion& e, const Expansion& f) {
    Expansion out;
    for (double c : f) out = sum(out, scale(e, c));
    return out;
}

Expansion negate(Expansion e) {
    for (double& c : e) c = -c;
    return e;
}

int sign_of(const Expansion& e) {
    if (e.empty()) return 0;
    const double top = e.back();
    return top > 0.0 ? 1 : (top < 0.0 ? -1 : 0);
}

int orient2d_exact(const Vec2& a, const Vec2& b, const Vec2& c) {
    const Expansion acx = from_diff(a.x, c.x), acy = from_diff(a.y, c.y);
    const Expansion bcx = from_diff(b.x, c.x), bcy = from_diff(b.y, c.y);
    return sign_of(sum(product(acx, bcy), negate(product(acy, bcx))));
}

int incircle_exact(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const Expansion adx = from_diff(a.x, d.x), ady = from_diff(a.y, d.y);
    const Expansion bdx = from_diff(b.x, d.x), bdy = from_diff(b.y, d.y);
    const Expansion cdx = from_diff(c.x, d.x), cdy = from_diff(c.y, d.y);
    const Expansion alift = sum(product(adx, adx), product(ady, ady));
    const Expansion blift = sum(product(bdx, bdx), product(bdy, bdy));
    const Expansion clift = sum(product(cdx, cdx), product(cdy, cdy));
    const Expansion bc = sum(product(bdx, cdy), negate(product(bdy, cdx)));
    const Expansion ca = sum(product(cdx, ady), negate(product(cdy, adx)));
    const Expansion ab = sum(product(adx, bdy), negate(product(ady, bdx)));
    return sign_of(sum(sum(product(alift, bc), product(blift, ca)), product(clift, ab)));
}

}  // namespace

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double left = (a.x - c.x) * (b.y - c.y);
    const double right = (a.y - c.y) * (b.x - c.x);
    const double det = left - right;
    const double bound = kOrientBound * (std::fabs(left) + std::fabs(right));
    if (det > bound) return 1;
    if (-det > bound) return -1;
    g_fallbacks.fetch_add(1, std::memory_order_relaxed);
    return orient2d_exact(a, b, c);
}

int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;

    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                       clift * (adxbdy - bdxady);
    const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                             (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                             (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
    const double bound = kIncircleBound * permanent;
    if (det > bound) return 1;
    if (-det > bound) return -1;
    g_fallbacks.fetch_add(1, std::memory_order_relaxed);
    return incircle_exact(a, b, c, d);
}

long exact_fallback_count() { return g_fallbacks.load(std::memory_order_relaxed); }

}  // namespace bubblemesh::predicates
