#include "dphase/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace dphase {

LocalInfimum::LocalInfimum(const DensitySpec& f, std::span<const double> x, double eps, const Ball& domain,
                           std::size_t y_budget, int rows, const SamplerConfig& z_sampler)
    : f_(f) {
  MinPointResult mp = find_min_point_F4(f, x, eps, domain, y_budget, rows, z_sampler);
  y_star_ = std::move(mp.y_star);
  certificate_ = std::move(mp.report);
  // Points strictly inside B(x, eps): shrink the closed-ball construction by a relative 1e-9.
  const Ball inner(Point(x.begin(), x.end()), eps * (1.0 - 1e-9));
  open_samples_ = ball_samples(inner, y_budget, z_sampler.seed ^ 0x0b0b0b0bULL, density_breakpoints(f));
}

EnvelopeBracket LocalInfimum::bracket(const GradientMatrix& z) const {
  double upper = std::numeric_limits<double>::infinity();
  for (const auto& y : open_samples_) upper = std::min(upper, eval_density(f_, y, z));
  double lower = 0.0;
  if (certified()) {
    const double fs = eval_density(f_, y_star_, z);
    if (!violates(fs, upper)) lower = std::min(fs, upper);
  }
  return {lower, upper};
}

EnvelopeBracket essinf_bracket(const LocalInfimum& li, const GradientMatrix& z) { return li.bracket(z); }

EnvelopeBracket biconjugate_bracket(const LocalInfimum& li, const GradientMatrix& z) {
  // f(y*, .) is a convex minorant of the local infimum, so it also bounds the biconjugate from below;
  // the biconjugate never exceeds the infimum, so the same upper bound applies.
  return li.bracket(z);
}

HPropertyParams HPropertyParams::from_structure(const StructureConstants& c, double L, double eps_star) {
  c.validate();
  const double p = c.exponents.p;
  const double q = c.exponents.q;
  HPropertyParams out;
  out.alpha = p;
  out.L = L;
  out.A = c.K1 + c.K2 * std::pow(L, (q - p) / p);
  out.b = c.K3;
  out.eps_star = eps_star;
  return out;
}

void HPropertyParams::validate() const {
  if (!(alpha >= 1.0)) throw PreconditionError("alpha must be >= 1");
  if (!(L > 0.0) || !(A > 0.0) || !(b >= 0.0)) throw PreconditionError("need L > 0, A > 0, b >= 0");
  if (!(eps_star > 0.0 && eps_star < 1.0)) throw PreconditionError("eps* must lie in (0, 1)");
}

ConditionReport check_H_property(const DensitySpec& f, const HPropertyParams& params,
                                 const StructureConstants& c, std::span<const double> x, double eps,
                                 const Ball& domain, const SamplerConfig& z_sampler, std::size_t y_budget) {
  params.validate();
  c.validate();
  const double p = c.exponents.p;
  const double q = c.exponents.q;
  const double sigma = c.exponents.sigma;
  const int n = c.exponents.n;
  if (!(eps > 0.0 && eps < params.eps_star)) {
    throw PreconditionError(fmt::format("eps = {} must lie in (0, eps* = {})", eps, params.eps_star));
  }
  if (params.alpha != p) throw PreconditionError("the H-property check requires alpha = p");
  if (static_cast<int>(x.size()) != n) throw PreconditionError("point dimension differs from n");

  const LocalInfimum li(f, x, eps, domain, y_budget, c.exponents.N, z_sampler);
  const double premise_bound = params.L * std::pow(eps, -n);
  const double power_factor = std::pow(params.L, (q - p) / p);

  std::vector<GradientMatrix> zs = sample_gradients(c.exponents.N, n, z_sampler);
  const double boundary_norm = std::pow(premise_bound, 1.0 / p) * (1.0 - 1e-12);
  std::size_t added = 0;
  for (std::size_t k = 1; k < zs.size() && added < 64; ++k, ++added) {
    GradientMatrix z = zs[k];
    z *= boundary_norm / z.norm();
    zs.push_back(z);
  }

  ConditionReport rep;
  rep.condition = "H-property";
  rep.seed = z_sampler.seed;
  const Point xp(x.begin(), x.end());
  std::size_t premise_points = 0;
  std::size_t conclusion_failures = 0;
  std::size_t intermediate_points = 0;
  std::size_t intermediate_failures = 0;
  auto record = [&](Witness w) {
    if (rep.passed()) {
      rep.verdict = Verdict::fail;
      rep.witness = std::move(w);
    }
  };
  for (const auto& z : zs) {
    ++rep.samples;
    const double zp = std::pow(z.norm(), p);
    const EnvelopeBracket br = li.bracket(z);
    if (std::pow(z.norm(), params.alpha) + br.upper <= premise_bound) {
      ++premise_points;
      const double lhs = eval_density(f, x, z);
      const double rhs = params.A * (br.lower + params.b + zp);
      if (violates(lhs, rhs)) {
        ++conclusion_failures;
        record(Witness{"H conclusion", xp, li.y_star(), z, lhs, rhs});
      }
    }
    if (zp <= premise_bound) {
      ++intermediate_points;
      const double lhs = std::pow(eps, sigma) * std::pow(z.norm(), q);
      const double rhs = power_factor * zp;
      if (violates(lhs, rhs, 1e-9)) {
        ++intermediate_failures;
        record(Witness{"H intermediate", xp, {}, z, lhs, rhs});
      }
    }
  }
  rep.add_detail("density", density_name(f));
  rep.add_detail("eps", eps);
  rep.add_detail("L", params.L);
  rep.add_detail("A", params.A);
  rep.add_detail("b", params.b);
  rep.add_detail("y_star", format_point(li.y_star()));
  rep.add_detail("min_point_certified", li.certified() ? "yes" : "no");
  rep.add_detail("premise_points", static_cast<double>(premise_points));
  rep.add_detail("conclusion_failures", static_cast<double>(conclusion_failures));
  rep.add_detail("intermediate_points", static_cast<double>(intermediate_points));
  rep.add_detail("intermediate_failures", static_cast<double>(intermediate_failures));
  return rep;
}

}  // namespace dphase
