#include "dphase/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dphase/fields.hpp"

namespace dphase {

namespace {

// Cross product of (b - a) and (c - a); <= 0 means b is not strictly below the chord from a to c.
double cross(const HullPoint& a, const HullPoint& b, const HullPoint& c) {
  return (b.s - a.s) * (c.v - a.v) - (b.v - a.v) * (c.s - a.s);
}

}  // namespace

double ConvexMinorant::evaluate(double s) const {
  if (s < vertices_.front().s || s > vertices_.back().s) return std::numeric_limits<double>::infinity();
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), s,
                             [](const HullPoint& p, double t) { return p.s < t; });
  if (it->s == s) return it->v;
  const HullPoint& b = *it;
  const HullPoint& a = *(it - 1);
  const double w = (s - a.s) / (b.s - a.s);
  return (1.0 - w) * a.v + w * b.v;
}

ConvexMinorant convex_hull_1d(std::span<const HullPoint> points) {
  if (points.size() < 2) throw PreconditionError("convex_hull_1d needs at least two points");
  std::vector<HullPoint> pts(points.begin(), points.end());
  for (const auto& p : pts) {
    if (!std::isfinite(p.s) || !std::isfinite(p.v)) throw PreconditionError("convex_hull_1d: non-finite point");
  }
  std::sort(pts.begin(), pts.end(), [](const HullPoint& a, const HullPoint& b) { return a.s < b.s; });
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].s == pts[i - 1].s) throw PreconditionError("convex_hull_1d: abscissae must be distinct");
  }
  std::vector<HullPoint> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0) hull.pop_back();
    hull.push_back(p);
  }
  return ConvexMinorant(std::move(hull));
}

}  // namespace dphase
