#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dphase/fields.hpp"

namespace dphase {

/// Exponents and dimensions shared by a density and its structure checks.
struct ExponentConfig {
  double p = 2.0;
  double q = 2.5;
  int n = 2;
  int N = 2;
  double sigma = 1.0;

  /// Requires 1 < p <= q, sigma > 0, 2 <= n <= 3, 1 <= N <= 3.
  void validate() const;
};

/// Weight a(x). All weights depend on x only through x_1, except `zero` and `constant`.
struct WeightSpec {
  enum class Kind { zero, constant, holder, step_holder, two_threshold, affine_x1 };

  Kind kind = Kind::zero;
  double value = 0.0;  ///< constant value, holder coefficient, or affine intercept
  double slope = 0.0;  ///< affine_x1 slope
  double r = 0.0;      ///< step_holder jump location
  double r1 = 0.0;     ///< two_threshold lower threshold
  double r2 = 0.0;     ///< two_threshold jump location
  double sigma = 1.0;
  double h = 0.0;      ///< jump height

  static WeightSpec zero();
  static WeightSpec constant(double c);
  /// c * (max{x_1, 0})^sigma
  static WeightSpec holder(double c, double sigma);
  /// 0 for x_1 <= 0, x_1^sigma on (0, r], x_1^sigma + h beyond r.
  static WeightSpec step_holder(double r, double sigma, double h);
  /// 0 for x_1 <= r1, (x_1 - r1)^sigma on (r1, r2], (x_1 - r1)^sigma + h beyond r2.
  static WeightSpec two_threshold(double r1, double r2, double sigma, double h);
  /// max{c0 + c1 x_1, 0}
  static WeightSpec affine_x1(double c0, double c1);

  void validate() const;
  std::string describe() const;
};

double eval_weight(const WeightSpec& w, std::span<const double> x);
/// The 1D profile t -> a(t, 0, ..., 0).
double eval_weight_1d(const WeightSpec& w, double x1);
/// x_1 locations where the weight has a kink or a jump.
std::vector<double> weight_breakpoints(const WeightSpec& w);

/// g(x_1, t) = max{ (max{t,0})^q - (max{x_1,0})^q ; 0 }.
double eval_g(double x1, double t, double q);
/// d/dt g(x_1, t), taking the left derivative at the kink t = x_1 > 0.
double eval_g_dt(double x1, double t, double q);

/// |z|^p + a(x) |z|^q
struct Zhikov {
  double p;
  double q;
  WeightSpec weight;
};
/// |z|^p + a(x) (max{z_n^1, 0})^q
struct Example1 {
  double p;
  double q;
  WeightSpec weight;
};
/// |z|^p + g(x_1, z_n^1)
struct Example2 {
  double p;
  double q;
};
/// |z|^p
struct PPower {
  double p;
};

/// One summand w(x) * base(z) of a composite density.
struct CompositeTerm {
  enum class Base {
    norm_power,     ///< |z|^e
    positive_part,  ///< (max{sign * z[alpha][i], 0})^e
    g_term,         ///< g(x_1, sign * z[alpha][i]) with exponent e
  };
  Base base = Base::norm_power;
  WeightSpec weight = WeightSpec::constant(1.0);
  double exponent = 2.0;
  int alpha = 0;
  int direction = -1;  ///< -1 selects the last direction n
  double sign = 1.0;
};

struct Composite {
  std::vector<CompositeTerm> terms;
};

using DensitySpec = std::variant<Zhikov, Example1, Example2, PPower, Composite>;

double eval_density(const DensitySpec& f, std::span<const double> x, const GradientMatrix& z);

/// Gradient in z. At the kinks of max{.,0} the one-sided derivative from the inactive side (0) is used;
/// at z = 0 the norm terms contribute 0.
GradientMatrix density_gradient(const DensitySpec& f, std::span<const double> x, const GradientMatrix& z);

/// Exponent p of the lower bound |z|^p (for composites: the smallest norm_power exponent, or 0).
double lower_exponent(const DensitySpec& f);
/// Exponent q of the upper growth (for composites: the largest exponent present).
double upper_exponent(const DensitySpec& f);

/// The weight a(x) for product-type densities (Zhikov, Example 1); nullptr otherwise.
const WeightSpec* product_weight(const DensitySpec& f);
/// Union of the breakpoints of every weight in the density, plus x_1 = 0 for Example 2.
std::vector<double> density_breakpoints(const DensitySpec& f);

std::string density_name(const DensitySpec& f);

/// Sampled report of the growth bounds |z|^p <= f(x,z) <= c1 |z|^q + c2: the smallest c1 making the
/// upper bound hold with c2 = f(x, 0) maximum over the samples.
struct GrowthReport {
  double lower_bound_violation = 0.0;  ///< max of |z|^p - f(x,z); <= 0 when the lower bound holds
  double c1 = 0.0;
  double c2 = 0.0;
  std::size_t samples = 0;
};
GrowthReport growth_report(const DensitySpec& f, std::span<const Point> xs,
                           std::span<const GradientMatrix> zs);

}  // namespace dphase
