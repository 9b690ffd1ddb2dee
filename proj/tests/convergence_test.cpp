#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "dphase/convergence.hpp"
#include "dphase/test_fields.hpp"

using namespace dphase;

namespace {

const WeightSpec kStep = WeightSpec::step_holder(0.5, 1.0, 0.2);

ConvergenceSetup setup_for(Point center) {
  ConvergenceSetup s;
  s.inner = Ball(std::move(center), 0.4);
  s.outer_radius = 0.7;
  return s;
}

}  // namespace

TEST(EpsSequence, GeometricTruncatedAtResolution) {
  ConvergenceSetup s = setup_for({0.0, 0.0});
  int dropped = -1;
  const auto eps = convergence_eps_sequence(s, 1.0 / 128, &dropped);
  // eps0 = (R - rho) / 2 = 0.15, halved while >= 2h = 1/64.
  const std::vector<double> want{0.15, 0.075, 0.0375, 0.01875};
  ASSERT_EQ(eps.size(), want.size());
  for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(eps[k], want[k], 1e-15);
  EXPECT_EQ(dropped, 3);
  // Without the cut all seven terms are kept, and the kernel rejects the unresolved ones.
  s.stop_at_resolution = false;
  EXPECT_EQ(convergence_eps_sequence(s, 1.0 / 128).size(), 7u);
  EXPECT_THROW(energy_convergence(PPower{2.0}, affine_field(1, 2, {1.0, 0.0}, {0.0}), 1, Grid::cube(2, -1.0, 1.0, 256), s,
                                  {1.0, 0.0, 0.0, ExponentConfig{2.0, 2.0, 2, 1, 1.0}}),
               PreconditionError);
  s.eps = {0.1, 0.2};
  EXPECT_THROW(convergence_eps_sequence(s, 1.0 / 128), PreconditionError);
  s.eps = {0.4};
  EXPECT_THROW(convergence_eps_sequence(s, 1.0 / 128), PreconditionError);
}

TEST(Convergence, AffineFieldIsReproducedExactly) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 128);
  const ExponentConfig e{2.0, 2.5, 2, 2, 1.0};
  const DensitySpec f = Zhikov{2.0, 2.5, kStep};
  const ConvergenceTrace tr = energy_convergence(f, affine_field(2, 2, {0.5, -1.0, 2.0, 0.3}, {0.1, 0.2}), 2, g,
                                                 setup_for({0.25, 0.0}), {2.8, 2.8, 0.0, e});
  ASSERT_FALSE(tr.rows.empty());
  for (const auto& row : tr.rows) {
    EXPECT_LT(row.rel_energy_error, 1e-6);
    EXPECT_LT(row.rel_grad_error, 1e-6);
  }
  EXPECT_TRUE(tr.passed()) << tr.summary();
}

TEST(Convergence, KinkedZhikovConverges) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 128);
  const ExponentConfig e{2.0, 2.5, 2, 2, 1.0};
  const ConvergenceTrace tr = energy_convergence(Zhikov{2.0, 2.5, kStep}, kinked_field(2, 0.5, 0.5), 2, g,
                                                 setup_for({0.25, 0.0}), {2.8, 2.8, 0.0, e});
  EXPECT_TRUE(tr.passed()) << tr.summary();
  EXPECT_TRUE(tr.domination_ok());
  for (const auto& row : tr.rows) {
    EXPECT_EQ(row.jensen_violations, 0u) << "eps " << row.eps;
    EXPECT_TRUE(row.sup_bound_ok);
    // Domination oracle: the integral bound dominates the mollified energy.
    EXPECT_LE(row.energy, row.dominated_integral * (1.0 + 1e-12));
  }
  EXPECT_LT(tr.rows.back().rel_energy_error, tr.rows.front().rel_energy_error);
}

TEST(Convergence, SampledOverloadMatchesFunctionOverload) {
  const Grid g = Grid::cube(2, -1.0, 1.0, 64);
  const ExponentConfig e{2.0, 4.0, 2, 2, 2.0};
  ConvergenceSetup s = setup_for({0.0, 0.0});
  s.refine = 1;
  const FieldFunction u = kinked_field(1, 0.0, 0.5);
  const StructureConstants c{1.0, 0.0, 1.0, e};
  const auto a = energy_convergence(Example2{2.0, 4.0}, u, 1, g, s, c);
  const auto b = energy_convergence(Example2{2.0, 4.0}, SampledField::sample(g, 1, u), s, c);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) EXPECT_EQ(a.rows[k].energy, b.rows[k].energy);
  std::ostringstream x, y;
  a.write_csv(x, {"seed: 1"});
  b.write_csv(y, {"seed: 1"});
  EXPECT_EQ(x.str(), y.str());
  EXPECT_EQ(x.str().rfind("# seed: 1\n", 0), 0u);
}
