#pragma once

#include <span>
#include <utility>
#include <vector>

namespace dphase {

struct HullPoint {
  double s;
  double v;
};

/// Piecewise-linear lower convex hull of a finite point set in the plane.
class ConvexMinorant {
 public:
  explicit ConvexMinorant(std::vector<HullPoint> vertices) : vertices_(std::move(vertices)) {}

  const std::vector<HullPoint>& vertices() const { return vertices_; }
  /// Linear interpolation between vertices; +infinity outside [first.s, last.s].
  double evaluate(double s) const;

 private:
  std::vector<HullPoint> vertices_;
};

/// Lower convex hull by the monotone chain. Requires at least two points with distinct abscissae.
ConvexMinorant convex_hull_1d(std::span<const HullPoint> points);

}  // namespace dphase
