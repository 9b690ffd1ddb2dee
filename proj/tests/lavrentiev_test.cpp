#include <cmath>

#include <gtest/gtest.h>

#include "dphase/lavrentiev.hpp"
#include "dphase/sampling.hpp"
#include "dphase/test_fields.hpp"

using namespace dphase;

TEST(Lbfgs, MinimizesAQuadratic) {
  // sum_i (i + 1) (x_i - i)^2, minimum 0 at x_i = i.
  const Objective f = [](std::span<const double> x, std::span<double> grad) {
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - static_cast<double>(i);
      v += (i + 1.0) * d * d;
      grad[i] = 2.0 * (i + 1.0) * d;
    }
    return v;
  };
  const LbfgsResult r = lbfgs_minimize(f, std::vector<double>(10, 0.0), LbfgsOptions{});
  ASSERT_TRUE(r.converged) << r.stop_reason;
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(r.x[i], static_cast<double>(i), 1e-6);
  for (std::size_t k = 1; k < r.history.size(); ++k) EXPECT_LT(r.history[k], r.history[k - 1]);
}

TEST(SimplexEnergy, LinearFieldAndGradient) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 8);
  const SimplexEnergy e(Zhikov{2.0, 2.5, WeightSpec::step_holder(0.5, 1.0, 0.2)}, g, 1);
  EXPECT_EQ(e.simplex_count(), 2u * 64u);
  std::vector<double> u(g.node_count());
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const Point x = g.point(node);
    u[node] = 0.3 * x[0] - 0.2 * x[1] + 0.05 * x[0] * x[0] * x[1];
  }
  std::vector<double> grad(u.size(), 0.0);
  const double v = e.evaluate(u, grad);
  EXPECT_GT(v, 0.0);
  // Central differences as the oracle.
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t node = static_cast<std::size_t>(rng.next() % g.node_count());
    std::vector<double> up = u, um = u;
    const double d = 1e-6;
    up[node] += d;
    um[node] -= d;
    const double fd = (e.evaluate(up, {}) - e.evaluate(um, {})) / (2 * d);
    EXPECT_NEAR(grad[node], fd, 1e-6 * std::max(1.0, std::abs(fd))) << "node " << node;
  }
  // An affine field has |Du|^2 = 0.13 everywhere under the power density.
  const SimplexEnergy pw(PPower{2.0}, g, 1);
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const Point x = g.point(node);
    u[node] = 0.3 * x[0] - 0.2 * x[1];
  }
  EXPECT_NEAR(pw.evaluate(u, {}), 0.13 * 4.0, 1e-12);
}

TEST(Lavrentiev, DirichletProbeOnCoarseMeshes) {
  LavrentievSetup s;
  s.meshes = {16, 32};
  const LavrentievProbeResult r = lavrentiev_probe(PPower{2.0}, harmonic_polynomial(4), s);
  ASSERT_EQ(r.levels.size(), 2u);
  EXPECT_TRUE(r.all_converged());
  EXPECT_TRUE(r.subclass_consistent());
  const double exact = harmonic_dirichlet_energy(4);
  for (const auto& lv : r.levels) {
    EXPECT_GE(lv.inf_smooth, lv.inf_full - 1e-8);
    EXPECT_LT(std::abs(lv.inf_full - exact) / exact, 0.05);
    EXPECT_LT(lv.eps_y, 3.0 * lv.h + 1e-12);
    for (std::size_t k = 1; k < lv.full.energies.size(); ++k) {
      EXPECT_LE(lv.full.energies[k], lv.full.energies[k - 1]);
    }
  }
  // The finer mesh is closer to the exact Dirichlet energy.
  EXPECT_LT(std::abs(r.levels[1].inf_full - exact), std::abs(r.levels[0].inf_full - exact));
}

TEST(Lavrentiev, RejectsNonConvexDensity) {
  LavrentievSetup s;
  s.meshes = {8};
  EXPECT_THROW(lavrentiev_probe(PPower{0.5}, harmonic_polynomial(4), s), PreconditionError);
}
