#include "dphase/conditions.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace dphase {

namespace {

// Points of the x_1 line through the domain center near breakpoint b: b itself, then b +- d for every
// straddle offset, ordered from the widest offset to the narrowest.
std::vector<double> straddle_abscissae(double b) {
  std::vector<double> out{b};
  for (double d : straddle_offsets()) {
    out.push_back(b + d);
    out.push_back(b - d);
  }
  return out;
}

Point on_line(const Ball& domain, double x1) {
  Point x = domain.center;
  x[0] = x1;
  return x;
}

}  // namespace

void StructureConstants::validate() const {
  exponents.validate();
  if (!(K1 >= 1.0)) throw PreconditionError("structure constant K1 must be >= 1");
  if (!(K2 >= 0.0) || !(K3 >= 0.0)) throw PreconditionError("structure constants K2, K3 must be >= 0");
}

ZsigmaConstants ZsigmaConstants::for_weight(const WeightSpec& w) {
  w.validate();
  double gap = 0.0;
  if (w.kind == WeightSpec::Kind::step_holder) {
    gap = w.r;
  } else if (w.kind == WeightSpec::Kind::two_threshold) {
    gap = w.r2 - w.r1;
  } else {
    throw PreconditionError("Z^sigma constants are tabulated for step_holder and two_threshold weights only");
  }
  const double c = std::pow(2.0, w.sigma) * (1.0 + w.h / std::pow(gap, w.sigma));
  return {c, c, w.sigma};
}

void ZsigmaConstants::validate() const {
  if (!(c5 >= 0.0) || !(c6 >= 1.0) || !(sigma > 0.0)) {
    throw PreconditionError("Z^sigma constants must satisfy c5 >= 0, c6 >= 1 and sigma > 0");
  }
}

double f1_margin(const ExponentConfig& cfg) {
  cfg.validate();
  return cfg.sigma - cfg.n * (cfg.q - cfg.p) / cfg.p;
}

bool check_F1(const ExponentConfig& cfg) { return f1_margin(cfg) >= 0.0; }

std::vector<std::pair<Point, Point>> sample_point_pairs(const Ball& domain, std::size_t budget,
                                                        std::uint64_t seed,
                                                        std::span<const double> breakpoints) {
  std::vector<std::pair<Point, Point>> out;
  out.reserve(budget);
  auto push = [&](Point a, Point b) {
    if (out.size() < budget && domain.contains(a) && domain.contains(b)) {
      out.emplace_back(std::move(a), std::move(b));
    }
  };

  std::vector<std::vector<double>> near;
  for (double b : breakpoints) near.push_back(straddle_abscissae(b));
  for (const auto& s : near) {
    for (double a : s) {
      for (double t : s) {
        if (a != t) push(on_line(domain, a), on_line(domain, t));
      }
    }
  }
  for (std::size_t i = 0; i < near.size(); ++i) {
    for (std::size_t j = 0; j < near.size(); ++j) {
      if (i == j) continue;
      for (double a : near[i]) {
        for (double t : near[j]) push(on_line(domain, a), on_line(domain, t));
      }
    }
  }

  const int n = domain.dim();
  LatticeSequence seq(2 * n, seed);
  std::vector<double> u(static_cast<std::size_t>(2 * n));
  const std::span<const double> us(u);
  while (out.size() < budget) {
    seq.next(u);
    out.emplace_back(map_to_ball(us.first(static_cast<std::size_t>(n)), domain),
                     map_to_ball(us.last(static_cast<std::size_t>(n)), domain));
  }
  return out;
}

ConditionReport check_F2_sampled(const DensitySpec& f, const StructureConstants& c, const Ball& domain,
                                 const SamplerConfig& sampler) {
  c.validate();
  if (domain.dim() != c.exponents.n) throw PreconditionError("domain dimension differs from n");
  const double p = c.exponents.p;
  const double q = c.exponents.q;
  const double sigma = c.exponents.sigma;

  ConditionReport rep;
  rep.condition = "F2";
  rep.seed = sampler.seed;
  const auto bps = density_breakpoints(f);
  const auto pairs = sample_point_pairs(domain, sampler.budget, sampler.seed, bps);
  const auto zs = sample_gradients(c.exponents.N, c.exponents.n, sampler);

  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [x, xt] = pairs[k];
    const GradientMatrix& z = zs[k % zs.size()];
    const double zn = z.norm();
    const double fx = eval_density(f, x, z);
    rep.samples = k + 1;
    const double lower = std::pow(zn, p);
    if (violates(lower, fx)) {
      rep.verdict = Verdict::fail;
      rep.witness = Witness{"F2 lower", x, {}, z, lower, fx};
      break;
    }
    const double rhs = c.K1 * eval_density(f, xt, z) + c.K2 * std::pow(distance(x, xt), sigma) * std::pow(zn, q) + c.K3;
    if (violates(fx, rhs)) {
      rep.verdict = Verdict::fail;
      rep.witness = Witness{"F2 upper", x, xt, z, fx, rhs};
      break;
    }
  }
  rep.add_detail("density", density_name(f));
  rep.add_detail("K1", c.K1);
  rep.add_detail("K2", c.K2);
  rep.add_detail("K3", c.K3);
  return rep;
}

ConditionReport check_convexity_sampled(const DensitySpec& f, std::span<const double> x, int rows,
                                        const SamplerConfig& sampler) {
  const int cols = static_cast<int>(x.size());
  ConditionReport rep;
  rep.condition = "F3";
  rep.seed = sampler.seed;
  const auto zs = sample_gradients(rows, cols, sampler);
  const std::size_t m = zs.size();
  for (std::size_t k = 0; k < m; ++k) {
    const GradientMatrix& z1 = zs[k];
    GradientMatrix z2;
    switch (k % 3) {
      case 0:
        z2 = 3.0 * z1;
        break;
      case 1:
        z2 = zs[(7 * k + 1) % m];
        break;
      default:
        z2 = z1;
        z2(0, cols - 1) = -z1(0, cols - 1) - 1e-3;
        break;
    }
    GradientMatrix mid = 0.5 * (z1 + z2);
    const double lhs = eval_density(f, x, mid);
    const double rhs = 0.5 * (eval_density(f, x, z1) + eval_density(f, x, z2));
    rep.samples = k + 1;
    if (violates(lhs, rhs)) {
      rep.verdict = Verdict::fail;
      rep.witness = Witness{"F3 midpoint convexity", Point(x.begin(), x.end()), {}, mid, lhs, rhs};
      rep.add_detail("z1", format_matrix(z1));
      rep.add_detail("z2", format_matrix(z2));
      break;
    }
  }
  rep.add_detail("density", density_name(f));
  return rep;
}

double surrogate_score(const DensitySpec& f, std::span<const double> y, int rows) {
  if (const WeightSpec* w = product_weight(f)) return eval_weight(*w, y);
  if (std::holds_alternative<Example2>(f)) return -y[0];
  if (std::holds_alternative<PPower>(f)) return 0.0;
  const int cols = static_cast<int>(y.size());
  double s = 0.0;
  for (double t : {1.0, 2.0}) {
    for (double sg : {-1.0, 1.0}) {
      s += eval_density(f, y, GradientMatrix::unit(rows, cols, 0, cols - 1, sg * t));
      s += eval_density(f, y, GradientMatrix::unit(rows, cols, 0, 0, sg * t));
    }
  }
  return s;
}

std::size_t surrogate_argmin(const DensitySpec& f, std::span<const Point> candidates, int rows) {
  if (candidates.empty()) throw PreconditionError("surrogate_argmin needs at least one candidate");
  std::size_t best = 0;
  double best_score = surrogate_score(f, candidates[0], rows);
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    const double s = surrogate_score(f, candidates[k], rows);
    if (s < best_score || (s == best_score && candidates[k] < candidates[best])) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

MinPointResult find_min_point_F4(const DensitySpec& f, std::span<const double> x, double eps,
                                 const Ball& domain, std::size_t y_budget, int rows,
                                 const SamplerConfig& z_sampler) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  if (static_cast<int>(x.size()) != domain.dim()) throw PreconditionError("point and domain dimensions differ");
  if (!(distance(x, domain.center) + eps < domain.radius)) {
    throw PreconditionError(fmt::format("closed ball B({}, {}) is not contained in the domain",
                                        format_point(Point(x.begin(), x.end())), eps));
  }
  const Ball ball(Point(x.begin(), x.end()), eps);
  const auto ys = ball_samples(ball, y_budget, z_sampler.seed, density_breakpoints(f));
  const auto zs = sample_gradients(rows, ball.dim(), z_sampler);

  MinPointResult res;
  res.y_star = ys[surrogate_argmin(f, ys, rows)];
  ConditionReport& rep = res.report;
  rep.condition = "F4";
  rep.seed = z_sampler.seed;
  for (const auto& z : zs) {
    const double fs = eval_density(f, res.y_star, z);
    for (const auto& y : ys) {
      ++rep.samples;
      const double fy = eval_density(f, y, z);
      if (violates(fs, fy)) {
        rep.verdict = Verdict::fail;
        rep.witness = Witness{"F4 minimum point", res.y_star, y, z, fs, fy};
        rep.add_detail("note", "the pointwise minimizer depends on z");
        break;
      }
    }
    if (!rep.passed()) break;
  }
  rep.add_detail("density", density_name(f));
  rep.add_detail("y_star", format_point(res.y_star));
  rep.add_detail("eps", eps);
  return res;
}

ConditionReport check_Zsigma(const WeightSpec& w, const ZsigmaConstants& c, const Ball& domain,
                             const SamplerConfig& sampler) {
  w.validate();
  c.validate();
  ConditionReport rep;
  rep.condition = "Zsigma";
  rep.seed = sampler.seed;
  const auto bps = weight_breakpoints(w);
  const auto pairs = sample_point_pairs(domain, sampler.budget, sampler.seed, bps);
  for (const auto& [x, xt] : pairs) {
    ++rep.samples;
    const double lhs = eval_weight(w, x);
    const double rhs = c.c6 * eval_weight(w, xt) + c.c5 * std::pow(distance(x, xt), c.sigma);
    if (violates(lhs, rhs)) {
      rep.verdict = Verdict::fail;
      rep.witness = Witness{"Zsigma", x, xt, std::nullopt, lhs, rhs};
      break;
    }
  }
  rep.add_detail("weight", w.describe());
  rep.add_detail("c5", c.c5);
  rep.add_detail("c6", c.c6);
  rep.add_detail("sigma", c.sigma);
  return rep;
}

}  // namespace dphase
