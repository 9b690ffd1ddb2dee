#include <cmath>

#include <gtest/gtest.h>

#include "dphase/convergence.hpp"
#include "dphase/mollifier.hpp"
#include "dphase/test_fields.hpp"

using namespace dphase;

namespace {

// Cartesian midpoint rule for int_{B(0,1)} g(|t|^2) dt in the plane, independent of the radial quadrature.
double planar_ball_integral(double (*g)(double)) {
  const int m = 2000;
  const double d = 2.0 / m;
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double x = -1.0 + (i + 0.5) * d, y = -1.0 + (j + 0.5) * d;
      sum += g(x * x + y * y);
    }
  }
  return sum * d * d;
}

}  // namespace

TEST(Bump, ProfileAndNormalization) {
  EXPECT_DOUBLE_EQ(bump_profile(0.0), std::exp(-1.0));
  EXPECT_EQ(bump_profile(1.0), 0.0);
  EXPECT_EQ(bump_profile(4.0), 0.0);
  const double mass = planar_ball_integral(bump_profile);
  EXPECT_NEAR(bump_normalization(2) * mass, 1.0, 1e-6);
  // int_{-1}^{1} exp(-1 / (1 - t^2)) dt = 0.443993816168...
  EXPECT_NEAR(1.0 / bump_normalization(1), 0.443993816168, 1e-9);
  EXPECT_THROW(bump_normalization(4), PreconditionError);
}

TEST(DiscreteKernel, WeightsSumToOneAndAreSymmetric) {
  const DiscreteKernel k(2, 1.0 / 128, 0.1);
  double sum = 0.0;
  for (std::size_t s = 0; s < k.size(); ++s) {
    EXPECT_GT(k.weight(s), 0.0);
    sum += k.weight(s);
    const auto o = k.offset(s);
    EXPECT_LT(std::hypot(o[0], o[1]) / 128.0, 0.1);
  }
  EXPECT_NEAR(sum, 1.0, 1e-14);
  EXPECT_EQ(k.reach(), 12);
  // L^2 norm of the discrete kernel approaches that of the continuous bump.
  EXPECT_NEAR(k.lp_norm(2.0) * 0.1, bump_lp_norm(2, 2.0), 0.01 * bump_lp_norm(2, 2.0));
  EXPECT_THROW(DiscreteKernel(2, 0.1, 0.15), PreconditionError);
}

TEST(Mollify, PreservesAffineFieldsExactly) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 64);
  const auto u = SampledField::sample(g, 2, affine_field(2, 2, {1.0, -2.0, 0.5, 3.0}, {0.3, -0.1}));
  const SampledField ue = mollify(u, MollifierSpec{0.1});
  const FieldFunction exact = affine_field(2, 2, {1.0, -2.0, 0.5, 3.0}, {0.3, -0.1});
  double out[2];
  for (std::size_t node = 0; node < ue.grid().node_count(); ++node) {
    exact(ue.grid().point(node), out);
    EXPECT_NEAR(ue.value(node)[0], out[0], 1e-12);
    EXPECT_NEAR(ue.value(node)[1], out[1], 1e-12);
  }
  EXPECT_LT(ue.grid().node_count(), g.node_count());
}

TEST(Mollify, PositivityAndCrop) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 64);
  const auto u = SampledField::sample(g, 1, [](std::span<const double> x, std::span<double> out) {
    out[0] = std::abs(x[0]) + x[1] * x[1];
  });
  const Ball crop({0.0, 0.0}, 0.5);
  const SampledField ue = mollify(u, MollifierSpec{0.125}, crop);
  double lo = INFINITY;
  for (double v : ue.values()) lo = std::min(lo, v);
  EXPECT_GT(lo, 0.0);  // the convolution of a nonnegative field, positive where the kernel sees u > 0
  EXPECT_TRUE(ue.grid().contains(crop));
  EXPECT_THROW(mollify(u, MollifierSpec{0.95}, Ball({0.0, 0.0}, 0.5)), PreconditionError);
}

TEST(Mollify, GradientOfSmoothFieldConverges) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 128);
  const auto u = SampledField::sample(g, 1, random_smooth_field(1, 2, 11));
  const Ball b({0.0, 0.0}, 0.5);
  const GradientField du = discrete_gradient(u);
  double prev = INFINITY;
  for (double eps : {0.2, 0.1, 0.05}) {
    const GradientField dm = mollify(du, MollifierSpec{eps}, b);
    double err = 0.0;
    for (std::size_t node : dm.grid().nodes_in_ball(b)) {
      const Point x = dm.grid().point(node);
      int m[2];
      for (int a = 0; a < 2; ++a) m[a] = static_cast<int>(std::lround((x[a] + 1.0) / g.spacing()));
      err = std::max(err, (dm.at(node) - du.at(g.index(m))).norm());
    }
    EXPECT_LT(err, prev) << "eps " << eps;
    prev = err;
  }
}

TEST(GradientBound, RandomFieldsAtSeveralEps) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 256);
  GradientBoundConfig cfg;
  cfg.p = 2.0;
  cfg.inner = Ball({0.0, 0.0}, 0.4);
  cfg.outer_radius = 0.9;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto u = SampledField::sample(g, 2, random_smooth_field(2, 2, seed));
    for (double eps : {0.4, 0.1}) {
      const GradientBoundReport r = gradient_bound_check(u, MollifierSpec{eps}, cfg);
      EXPECT_TRUE(r.passed) << "seed " << seed << " eps " << eps;
      EXPECT_NEAR(r.bound, r.c1 * std::pow(eps, -1.0), 1e-12 * r.bound);
    }
  }
}

TEST(GradientBound, ScalesLikeEpsToMinusNOverP) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 128);
  const auto u = SampledField::sample(g, 1, random_smooth_field(1, 2, 4));
  GradientBoundConfig cfg;
  cfg.p = 3.0;
  cfg.inner = Ball({0.0, 0.0}, 0.3);
  cfg.outer_radius = 0.8;
  const auto a = gradient_bound_check(u, MollifierSpec{0.4}, cfg);
  const auto b = gradient_bound_check(u, MollifierSpec{0.2}, cfg);
  EXPECT_NEAR(b.bound / a.bound, std::pow(2.0, 2.0 / 3.0), 1e-12);
  cfg.inner = Ball({0.0, 0.0}, 0.7);
  EXPECT_THROW(gradient_bound_check(u, MollifierSpec{0.2}, cfg), PreconditionError);
}
