#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "dphase/hull.hpp"
#include "dphase/sampling.hpp"

using namespace dphase;

namespace {

// Largest value at s over the lines through two input points that lie below every point.
double support_line_oracle(const std::vector<HullPoint>& pts, double s) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (pts[i].s >= pts[j].s) continue;
      const double slope = (pts[j].v - pts[i].v) / (pts[j].s - pts[i].s);
      bool below = true;
      for (const auto& p : pts) {
        const double line = pts[i].v + slope * (p.s - pts[i].s);
        if (line > p.v + 1e-12 * std::max(1.0, std::abs(p.v))) {
          below = false;
          break;
        }
      }
      if (below) best = std::max(best, pts[i].v + slope * (s - pts[i].s));
    }
  }
  return best;
}

std::vector<HullPoint> random_set(Rng& rng) {
  const int m = 2 + static_cast<int>(rng.uniform() * 49.0);
  std::vector<HullPoint> pts;
  while (static_cast<int>(pts.size()) < m) {
    const double s = rng.uniform(-5.0, 5.0);
    bool dup = false;
    for (const auto& p : pts) dup = dup || p.s == s;
    if (!dup) pts.push_back({s, rng.uniform(-3.0, 3.0) + 0.2 * s * s});
  }
  return pts;
}

}  // namespace

TEST(ConvexHull, MatchesSupportLineOracle) {
  Rng rng(2024);
  for (int set = 0; set < 100; ++set) {
    const auto pts = random_set(rng);
    const ConvexMinorant h = convex_hull_1d(pts);
    const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](auto a, auto b) { return a.s < b.s; });
    for (const auto& p : pts) EXPECT_NEAR(h.evaluate(p.s), support_line_oracle(pts, p.s), 1e-9);
    for (int k = 0; k <= 20; ++k) {
      const double s = std::min(hi->s, lo->s + (hi->s - lo->s) * k / 20.0);
      EXPECT_NEAR(h.evaluate(s), support_line_oracle(pts, s), 1e-9);
    }
  }
}

TEST(ConvexHull, VerticesAndRange) {
  const std::vector<HullPoint> pts{{0.0, 0.0}, {1.0, -1.0}, {2.0, 0.5}, {3.0, 0.0}, {1.5, 5.0}};
  const ConvexMinorant h = convex_hull_1d(pts);
  ASSERT_EQ(h.vertices().size(), 3u);
  EXPECT_EQ(h.vertices()[1].s, 1.0);
  EXPECT_DOUBLE_EQ(h.evaluate(2.0), -1.0 + 0.5);
  EXPECT_TRUE(std::isinf(h.evaluate(3.5)));
  // Collinear middle points are dropped.
  const std::vector<HullPoint> line{{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}};
  EXPECT_EQ(convex_hull_1d(line).vertices().size(), 2u);
}

TEST(ConvexHull, RejectsDegenerateInput) {
  const std::vector<HullPoint> one{{0.0, 1.0}};
  EXPECT_THROW(convex_hull_1d(one), std::invalid_argument);
  const std::vector<HullPoint> dup{{0.0, 1.0}, {0.0, 2.0}};
  EXPECT_THROW(convex_hull_1d(dup), std::invalid_argument);
  const std::vector<HullPoint> nan{{0.0, 1.0}, {1.0, std::nan("")}};
  EXPECT_THROW(convex_hull_1d(nan), std::invalid_argument);
}
