#include "dphase/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

namespace dphase {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

double norm_power(const GradientMatrix& z, double e) {
  const double r = z.norm();
  return r == 0.0 ? 0.0 : std::pow(r, e);
}

/// d/dz |z|^e = e |z|^(e-2) z, taken as 0 at the origin.
void add_norm_power_gradient(GradientMatrix& out, const GradientMatrix& z, double e, double scale) {
  const double r = z.norm();
  if (r == 0.0) return;
  const double c = scale * e * std::pow(r, e - 2.0);
  for (std::size_t k = 0; k < z.size(); ++k) out.entries()[k] += c * z.entries()[k];
}

int resolve_direction(int direction, const GradientMatrix& z) {
  return direction < 0 ? z.cols() - 1 : direction;
}

void check_shape(std::span<const double> x, const GradientMatrix& z) {
  if (static_cast<int>(x.size()) != z.cols()) {
    throw PreconditionError(fmt::format("density: point has dimension {} but z has {} columns", x.size(), z.cols()));
  }
}

double eval_term(const CompositeTerm& t, std::span<const double> x, const GradientMatrix& z) {
  const double w = eval_weight(t.weight, x);
  if (w == 0.0) return 0.0;
  switch (t.base) {
    case CompositeTerm::Base::norm_power:
      return w * norm_power(z, t.exponent);
    case CompositeTerm::Base::positive_part: {
      const double s = positive_part(t.sign * z(t.alpha, resolve_direction(t.direction, z)));
      return s == 0.0 ? 0.0 : w * std::pow(s, t.exponent);
    }
    case CompositeTerm::Base::g_term:
      return w * eval_g(x[0], t.sign * z(t.alpha, resolve_direction(t.direction, z)), t.exponent);
  }
  return 0.0;
}

void add_term_gradient(GradientMatrix& out, const CompositeTerm& t, std::span<const double> x,
                       const GradientMatrix& z) {
  const double w = eval_weight(t.weight, x);
  if (w == 0.0) return;
  const int i = resolve_direction(t.direction, z);
  switch (t.base) {
    case CompositeTerm::Base::norm_power:
      add_norm_power_gradient(out, z, t.exponent, w);
      break;
    case CompositeTerm::Base::positive_part: {
      const double s = positive_part(t.sign * z(t.alpha, i));
      if (s > 0.0) out(t.alpha, i) += w * t.sign * t.exponent * std::pow(s, t.exponent - 1.0);
      break;
    }
    case CompositeTerm::Base::g_term:
      out(t.alpha, i) += w * t.sign * eval_g_dt(x[0], t.sign * z(t.alpha, i), t.exponent);
      break;
  }
}

}  // namespace

// --- ExponentConfig ---------------------------------------------------------

void ExponentConfig::validate() const {
  if (!(p > 1.0)) throw PreconditionError(fmt::format("exponent p must exceed 1, got {}", p));
  if (!(q >= p)) throw PreconditionError(fmt::format("exponent q must be at least p, got q={} p={}", q, p));
  if (!(sigma > 0.0)) throw PreconditionError("sigma must be positive");
  if (n < 2 || n > kMaxDim) throw PreconditionError(fmt::format("spatial dimension n={} unsupported", n));
  if (N < 1 || N > kMaxTargetDim) throw PreconditionError(fmt::format("target dimension N={} unsupported", N));
}

// --- WeightSpec -------------------------------------------------------------

WeightSpec WeightSpec::zero() { return {}; }

WeightSpec WeightSpec::constant(double c) {
  WeightSpec w;
  w.kind = Kind::constant;
  w.value = c;
  w.validate();
  return w;
}

WeightSpec WeightSpec::holder(double c, double sigma) {
  WeightSpec w;
  w.kind = Kind::holder;
  w.value = c;
  w.sigma = sigma;
  w.validate();
  return w;
}

WeightSpec WeightSpec::step_holder(double r, double sigma, double h) {
  WeightSpec w;
  w.kind = Kind::step_holder;
  w.r = r;
  w.sigma = sigma;
  w.h = h;
  w.validate();
  return w;
}

WeightSpec WeightSpec::two_threshold(double r1, double r2, double sigma, double h) {
  WeightSpec w;
  w.kind = Kind::two_threshold;
  w.r1 = r1;
  w.r2 = r2;
  w.sigma = sigma;
  w.h = h;
  w.validate();
  return w;
}

WeightSpec WeightSpec::affine_x1(double c0, double c1) {
  WeightSpec w;
  w.kind = Kind::affine_x1;
  w.value = c0;
  w.slope = c1;
  return w;
}

void WeightSpec::validate() const {
  switch (kind) {
    case Kind::zero:
    case Kind::affine_x1:
      return;
    case Kind::constant:
      if (!(value >= 0.0)) throw PreconditionError("constant weight must be nonnegative");
      return;
    case Kind::holder:
      if (!(value >= 0.0) || !(sigma > 0.0)) throw PreconditionError("holder weight needs c >= 0, sigma > 0");
      return;
    case Kind::step_holder:
      if (!(r > 0.0) || !(sigma > 0.0) || !(h > 0.0)) {
        throw PreconditionError("step weight needs r > 0, sigma > 0, h > 0");
      }
      return;
    case Kind::two_threshold:
      if (!(r1 < r2) || !(sigma > 0.0) || !(h > 0.0)) {
        throw PreconditionError("two-threshold weight needs r1 < r2, sigma > 0, h > 0");
      }
      return;
  }
}

std::string WeightSpec::describe() const {
  switch (kind) {
    case Kind::zero: return "zero";
    case Kind::constant: return fmt::format("constant(c={})", value);
    case Kind::holder: return fmt::format("holder(c={}, sigma={})", value, sigma);
    case Kind::step_holder: return fmt::format("step_holder(r={}, sigma={}, h={})", r, sigma, h);
    case Kind::two_threshold:
      return fmt::format("two_threshold(r1={}, r2={}, sigma={}, h={})", r1, r2, sigma, h);
    case Kind::affine_x1: return fmt::format("affine_x1(c0={}, c1={})", value, slope);
  }
  return "unknown";
}

double eval_weight_1d(const WeightSpec& w, double t) {
  switch (w.kind) {
    case WeightSpec::Kind::zero:
      return 0.0;
    case WeightSpec::Kind::constant:
      return w.value;
    case WeightSpec::Kind::holder:
      return t > 0.0 ? w.value * std::pow(t, w.sigma) : 0.0;
    case WeightSpec::Kind::step_holder:
      if (t <= 0.0) return 0.0;
      if (t <= w.r) return std::pow(t, w.sigma);
      return std::pow(t, w.sigma) + w.h;
    case WeightSpec::Kind::two_threshold:
      if (t <= w.r1) return 0.0;
      if (t <= w.r2) return std::pow(t - w.r1, w.sigma);
      return std::pow(t - w.r1, w.sigma) + w.h;
    case WeightSpec::Kind::affine_x1:
      return positive_part(w.value + w.slope * t);
  }
  return 0.0;
}

double eval_weight(const WeightSpec& w, std::span<const double> x) {
  if (x.empty()) throw PreconditionError("eval_weight: empty point");
  return eval_weight_1d(w, x[0]);
}

std::vector<double> weight_breakpoints(const WeightSpec& w) {
  switch (w.kind) {
    case WeightSpec::Kind::holder: return {0.0};
    case WeightSpec::Kind::step_holder: return {0.0, w.r};
    case WeightSpec::Kind::two_threshold: return {w.r1, w.r2};
    case WeightSpec::Kind::affine_x1:
      if (w.slope != 0.0) return {-w.value / w.slope};
      return {};
    default: return {};
  }
}

double eval_g(double x1, double t, double q) {
  if (!(q > 1.0)) throw PreconditionError(fmt::format("eval_g: exponent q must exceed 1, got {}", q));
  const double tp = positive_part(t);
  const double xp = positive_part(x1);
  const double tq = tp == 0.0 ? 0.0 : std::pow(tp, q);
  const double xq = xp == 0.0 ? 0.0 : std::pow(xp, q);
  return positive_part(tq - xq);
}

double eval_g_dt(double x1, double t, double q) {
  if (t <= 0.0) return 0.0;
  if (t <= positive_part(x1)) return 0.0;
  return q * std::pow(t, q - 1.0);
}

// --- densities --------------------------------------------------------------

double eval_density(const DensitySpec& f, std::span<const double> x, const GradientMatrix& z) {
  check_shape(x, z);
  return std::visit(
      Overloaded{
          [&](const Zhikov& d) {
            const double a = eval_weight(d.weight, x);
            return norm_power(z, d.p) + (a == 0.0 ? 0.0 : a * norm_power(z, d.q));
          },
          [&](const Example1& d) {
            const double a = eval_weight(d.weight, x);
            const double s = positive_part(z.top_last());
            return norm_power(z, d.p) + (a == 0.0 || s == 0.0 ? 0.0 : a * std::pow(s, d.q));
          },
          [&](const Example2& d) { return norm_power(z, d.p) + eval_g(x[0], z.top_last(), d.q); },
          [&](const PPower& d) { return norm_power(z, d.p); },
          [&](const Composite& d) {
            double s = 0.0;
            for (const auto& t : d.terms) s += eval_term(t, x, z);
            return s;
          },
      },
      f);
}

GradientMatrix density_gradient(const DensitySpec& f, std::span<const double> x, const GradientMatrix& z) {
  check_shape(x, z);
  GradientMatrix out(z.rows(), z.cols());
  const int last = z.cols() - 1;
  std::visit(Overloaded{
                 [&](const Zhikov& d) {
                   add_norm_power_gradient(out, z, d.p, 1.0);
                   add_norm_power_gradient(out, z, d.q, eval_weight(d.weight, x));
                 },
                 [&](const Example1& d) {
                   add_norm_power_gradient(out, z, d.p, 1.0);
                   const double s = positive_part(z.top_last());
                   if (s > 0.0) out(0, last) += eval_weight(d.weight, x) * d.q * std::pow(s, d.q - 1.0);
                 },
                 [&](const Example2& d) {
                   add_norm_power_gradient(out, z, d.p, 1.0);
                   out(0, last) += eval_g_dt(x[0], z.top_last(), d.q);
                 },
                 [&](const PPower& d) { add_norm_power_gradient(out, z, d.p, 1.0); },
                 [&](const Composite& d) {
                   for (const auto& t : d.terms) add_term_gradient(out, t, x, z);
                 },
             },
             f);
  return out;
}

double lower_exponent(const DensitySpec& f) {
  return std::visit(Overloaded{
                        [](const Zhikov& d) { return d.p; },
                        [](const Example1& d) { return d.p; },
                        [](const Example2& d) { return d.p; },
                        [](const PPower& d) { return d.p; },
                        [](const Composite& d) {
                          double p = std::numeric_limits<double>::infinity();
                          for (const auto& t : d.terms) {
                            if (t.base == CompositeTerm::Base::norm_power) p = std::min(p, t.exponent);
                          }
                          return std::isfinite(p) ? p : 0.0;
                        },
                    },
                    f);
}

double upper_exponent(const DensitySpec& f) {
  return std::visit(Overloaded{
                        [](const Zhikov& d) { return d.q; },
                        [](const Example1& d) { return d.q; },
                        [](const Example2& d) { return d.q; },
                        [](const PPower& d) { return d.p; },
                        [](const Composite& d) {
                          double q = 0.0;
                          for (const auto& t : d.terms) q = std::max(q, t.exponent);
                          return q;
                        },
                    },
                    f);
}

const WeightSpec* product_weight(const DensitySpec& f) {
  if (const auto* z = std::get_if<Zhikov>(&f)) return &z->weight;
  if (const auto* e = std::get_if<Example1>(&f)) return &e->weight;
  return nullptr;
}

std::vector<double> density_breakpoints(const DensitySpec& f) {
  std::vector<double> out;
  std::visit(Overloaded{
                 [&](const Zhikov& d) { out = weight_breakpoints(d.weight); },
                 [&](const Example1& d) { out = weight_breakpoints(d.weight); },
                 [&](const Example2&) { out = {0.0}; },
                 [&](const PPower&) {},
                 [&](const Composite& d) {
                   for (const auto& t : d.terms) {
                     const auto b = weight_breakpoints(t.weight);
                     out.insert(out.end(), b.begin(), b.end());
                     if (t.base == CompositeTerm::Base::g_term) out.push_back(0.0);
                   }
                 },
             },
             f);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string density_name(const DensitySpec& f) {
  return std::visit(Overloaded{
                        [](const Zhikov& d) {
                          return fmt::format("zhikov(p={}, q={}, a={})", d.p, d.q, d.weight.describe());
                        },
                        [](const Example1& d) {
                          return fmt::format("example1(p={}, q={}, a={})", d.p, d.q, d.weight.describe());
                        },
                        [](const Example2& d) { return fmt::format("example2(p={}, q={})", d.p, d.q); },
                        [](const PPower& d) { return fmt::format("ppower(p={})", d.p); },
                        [](const Composite& d) { return fmt::format("composite({} terms)", d.terms.size()); },
                    },
                    f);
}

GrowthReport growth_report(const DensitySpec& f, std::span<const Point> xs, std::span<const GradientMatrix> zs) {
  GrowthReport r;
  r.lower_bound_violation = -std::numeric_limits<double>::infinity();
  const double p = lower_exponent(f);
  const double q = upper_exponent(f);
  for (const auto& x : xs) {
    for (const auto& z : zs) {
      const double v = eval_density(f, x, z);
      const double nz = z.norm();
      r.lower_bound_violation = std::max(r.lower_bound_violation, norm_power(z, p) - v);
      if (nz <= 1.0) {
        r.c2 = std::max(r.c2, v);
      } else {
        r.c1 = std::max(r.c1, v / std::pow(nz, q));
      }
      ++r.samples;
    }
  }
  return r;
}

}  // namespace dphase
