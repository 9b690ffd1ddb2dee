#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "dphase/field_io.hpp"
#include "dphase/fields.hpp"
#include "dphase/test_fields.hpp"

using namespace dphase;

TEST(GradientMatrix, NormAndArithmetic) {
  GradientMatrix z(2, 3);
  z(0, 0) = 3.0;
  z(1, 2) = 4.0;
  EXPECT_DOUBLE_EQ(z.norm(), 5.0);
  EXPECT_DOUBLE_EQ(z.top_last(), 0.0);
  const GradientMatrix w = 2.0 * z - z;
  EXPECT_DOUBLE_EQ(w(1, 2), 4.0);
  EXPECT_DOUBLE_EQ(z.dot(w), 25.0);
  EXPECT_THROW(z += GradientMatrix(3, 2), PreconditionError);
  EXPECT_DOUBLE_EQ(GradientMatrix::unit(1, 2, 0, 1, -2.0).top_last(), -2.0);
}

TEST(Grid, IndexingRoundTrip) {
  const Grid g = Grid::cube(3, -1.0, 1.0, 4);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
  EXPECT_EQ(g.node_count(), 125u);
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const auto m = g.multi_index(node);
    EXPECT_EQ(g.index(std::span<const int>(m.data(), 3)), node);
  }
  // Last axis fastest.
  const int m[] = {0, 0, 1};
  EXPECT_EQ(g.index(m), 1u);
  EXPECT_DOUBLE_EQ(g.point(1)[2], -0.5);
}

TEST(Grid, ContainsAndBallNodes) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 8);
  EXPECT_TRUE(g.contains(Ball({0.0, 0.0}, 1.0)));
  EXPECT_FALSE(g.contains(Ball({0.5, 0.0}, 0.6)));
  // Nodes strictly inside B(0, 0.5) with h = 0.25: the 3x3 block around the origin.
  EXPECT_EQ(g.nodes_in_ball(Ball({0.0, 0.0}, 0.5)).size(), 9u);
  EXPECT_THROW(Grid::cube(2, 1.0, -1.0, 4), PreconditionError);
}

TEST(DiscreteGradient, ExactForQuadraticsInTheInterior) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 16);
  const auto u = SampledField::sample(g, 2, [](std::span<const double> x, std::span<double> out) {
    out[0] = x[0] * x[0] + 3.0 * x[0] * x[1];
    out[1] = 2.0 * x[0] - x[1];
  });
  const GradientField du = discrete_gradient(u);
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const Point x = g.point(node);
    const GradientMatrix z = du.at(node);
    EXPECT_NEAR(z(1, 0), 2.0, 1e-12);
    EXPECT_NEAR(z(1, 1), -1.0, 1e-12);
    if (g.is_interior(node)) {
      EXPECT_NEAR(z(0, 0), 2.0 * x[0] + 3.0 * x[1], 1e-12);
      EXPECT_NEAR(z(0, 1), 3.0 * x[0], 1e-12);
    }
  }
}

TEST(LpNorm, ConstantOverBallApproximatesVolume) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 256);
  const std::vector<double> ones(g.node_count(), 1.0);
  const double area = std::numbers::pi * 0.25;
  EXPECT_NEAR(lp_norm(g, ones, 2.0, Ball({0.0, 0.0}, 0.5)), std::sqrt(area), 0.01 * std::sqrt(area));
  EXPECT_NEAR(lp_norm(g, ones, 1.0, Ball({0.0, 0.0}, 0.5)), area, 0.01 * area);
  EXPECT_THROW(lp_norm(g, ones, 0.5, Ball({0.0, 0.0}, 0.5)), PreconditionError);
  EXPECT_THROW(lp_norm(g, ones, 2.0, Ball({0.8, 0.0}, 0.5)), PreconditionError);
}

TEST(Truncation, ProjectsOntoTheClosedBall) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 32);
  const auto u = SampledField::sample(g, 2, random_smooth_field(2, 2, 5));
  const double k = 0.2;
  const SampledField uk = vectorial_truncation(u, k);
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    EXPECT_LE(uk.magnitude(node), k * (1.0 + 1e-15));
    if (u.magnitude(node) <= k) {
      EXPECT_EQ(uk.value(node)[0], u.value(node)[0]);
    }
  }
  EXPECT_THROW(vectorial_truncation(u, 0.0), PreconditionError);
}

TEST(Truncation, GradientIdentityMatchesFiniteDifferences) {
  // u(x) = b + B x with |u| > k near x0; the oracle differentiates x -> k u(x)/|u(x)| numerically.
  const double b[2] = {1.0, -0.5};
  const double B[2][2] = {{0.3, -1.2}, {0.7, 0.4}};
  const double k = 0.6;
  auto truncated = [&](double x0, double x1, int a) {
    const double u0 = b[0] + B[0][0] * x0 + B[0][1] * x1;
    const double u1 = b[1] + B[1][0] * x0 + B[1][1] * x1;
    const double m = std::hypot(u0, u1);
    return k * (a == 0 ? u0 : u1) / m;
  };
  const double x0 = 0.1, x1 = 0.2;
  const double u[2] = {b[0] + B[0][0] * x0 + B[0][1] * x1, b[1] + B[1][0] * x0 + B[1][1] * x1};
  GradientMatrix du(2, 2);
  for (int a = 0; a < 2; ++a) {
    for (int i = 0; i < 2; ++i) du(a, i) = B[a][i];
  }
  const GradientMatrix got = truncation_gradient_identity(u, du, k);
  const double d = 1e-6;
  for (int a = 0; a < 2; ++a) {
    EXPECT_NEAR(got(a, 0), (truncated(x0 + d, x1, a) - truncated(x0 - d, x1, a)) / (2 * d), 1e-8);
    EXPECT_NEAR(got(a, 1), (truncated(x0, x1 + d, a) - truncated(x0, x1 - d, a)) / (2 * d), 1e-8);
  }
}

TEST(Truncation, ContractionHoldsForSeededFields) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 64);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto u = SampledField::sample(g, 3, random_smooth_field(3, 2, seed));
    const TruncationContraction tc = check_truncation_contraction(u, 0.25);
    EXPECT_TRUE(tc.passed()) << "seed " << seed;
    EXPECT_EQ(tc.nodes, 63u * 63u);
    EXPECT_LE(tc.max_ratio, 1.0 + 1e-12);
  }
}

TEST(FieldCsv, RoundTripAndHeaderCheck) {
  const Grid g = Grid::cube(2, 0.0, 1.0, 3);
  const auto u = SampledField::sample(g, 2, affine_field(2, 2, {1.0, 2.0, 3.0, 4.0}, {0.1, 0.2}));
  std::stringstream ss;
  write_field_csv(ss, u, {"seed: 3"});
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("# seed: 3\ni1,i2,u1,u2\n0,0,0.1,0.2\n", 0), 0u);
  const SampledField back = read_field_csv(ss, g, 2);
  ASSERT_EQ(back.values().size(), u.values().size());
  for (std::size_t k = 0; k < u.values().size(); ++k) EXPECT_EQ(back.values()[k], u.values()[k]);

  std::stringstream bad("x,y,u1,u2\n");
  EXPECT_THROW(read_field_csv(bad, g, 2), PreconditionError);
  std::stringstream short_rows("i1,i2,u1,u2\n0,0,1,1\n");
  EXPECT_THROW(read_field_csv(short_rows, g, 2), PreconditionError);
}
