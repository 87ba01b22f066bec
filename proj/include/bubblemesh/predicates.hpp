#pragma once

#include "bubblemesh/geometry.hpp"

namespace bubblemesh::predicates {

// Floating-point filters with an exact expansion fallback. Both return the
// sign of the determinant: +1, 0 or -1.

/// Sign of the signed area of (a, b, c); +1 when counterclockwise.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

/// +1 when d lies strictly inside the circumcircle of the counterclockwise
/// triangle (a, b, c), -1 outside, 0 cocircular.
int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

/// Number of exact fallbacks taken since program start (diagnostics).
long exact_fallback_count();

}  // namespace bubblemesh::predicates
