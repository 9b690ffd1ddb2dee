#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dphase/energy.hpp"
#include "dphase/test_fields.hpp"

using namespace dphase;

TEST(Energy, LinearFieldGivesNormSquaredTimesArea) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 256);
  const auto u = SampledField::sample(g, 2, affine_field(2, 2, {1.0, 2.0, -0.5, 0.25}, {0.0, 0.0}));
  const double norm2 = 1.0 + 4.0 + 0.25 + 0.0625;
  const Ball b({0.1, -0.2}, 0.6);
  const double want = norm2 * std::numbers::pi * 0.36;
  EXPECT_NEAR(energy(PPower{2.0}, u, b), want, 0.02 * want);
}

TEST(Energy, Example2VanishingBranch) {
  // u^1 = 0.1 x_2: t = 0.1 <= x_1 on B((0.5, 0), 0.3), so g = 0 and f = |z|^2.
  const Grid g = Grid::cube(2, -1.0, 1.0, 256);
  const auto u = SampledField::sample(g, 1, affine_field(1, 2, {0.0, 0.1}, {0.0}));
  const Ball b({0.5, 0.0}, 0.3);
  EXPECT_NEAR(energy(Example2{2.0, 4.0}, u, b), energy(PPower{2.0}, u, b), 1e-15);
  // On the left half plane g = t^q is active.
  const Ball left({-0.5, 0.0}, 0.3);
  EXPECT_GT(energy(Example2{2.0, 4.0}, u, left), energy(PPower{2.0}, u, left));
}

TEST(Energy, GrowsWithTheRegion) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 128);
  const auto u = SampledField::sample(g, 2, kinked_field(2, 0.5, 0.5));
  const DensitySpec f = Zhikov{2.0, 2.5, WeightSpec::step_holder(0.5, 1.0, 0.2)};
  double prev = 0.0;
  for (double r : {0.2, 0.4, 0.6, 0.7}) {
    const double e = energy(f, u, Ball({0.25, 0.0}, r));
    EXPECT_GT(e, prev);
    prev = e;
  }
  EXPECT_THROW(energy(f, u, Ball({0.5, 0.0}, 0.8)), PreconditionError);
}

TEST(Energy, ScalarTruncationSplitMatchesChainRuleEnergy) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 128);
  const auto u = SampledField::sample(g, 1, random_smooth_field(1, 2, 8));
  const DensitySpec f = Example1{2.0, 2.5, WeightSpec::step_holder(0.5, 1.0, 0.2)};
  const Ball b({0.0, 0.0}, 0.9);
  const double k = 0.3;
  const EnergySplit split = scalar_truncation_energy_split(f, u, k, b);
  // Oracle: the chain-rule gradient of u_k is Du where |u| <= k and 0 elsewhere.
  const GradientField du = discrete_gradient(u);
  double want = 0.0;
  for (std::size_t node : g.nodes_in_ball(b)) {
    const GradientMatrix z = std::abs(u.value(node)[0]) <= k ? du.at(node) : GradientMatrix(1, 2);
    want += eval_density(f, g.point(node), z);
  }
  want *= g.spacing() * g.spacing();
  EXPECT_NEAR(split.inside + split.outside, want, 1e-9 * want);
  EXPECT_EQ(split.outside, 0.0);  // f(x, 0) = 0
  EXPECT_NEAR(split.inside + split.outside,
              energy(f, truncation_gradient_field(u, du, k), b), 1e-9 * want);
  const auto v = SampledField::sample(g, 2, random_smooth_field(2, 2, 8));
  EXPECT_THROW(scalar_truncation_energy_split(f, v, k, b), PreconditionError);
}
