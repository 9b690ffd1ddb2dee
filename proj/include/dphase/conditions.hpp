#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dphase/densities.hpp"
#include "dphase/report.hpp"
#include "dphase/sampling.hpp"

namespace dphase {

/// Constants of the two-sided structure bound
///   |z|^p <= f(x,z) <= K1 f(x~,z) + K2 |x - x~|^sigma |z|^q + K3.
struct StructureConstants {
  double K1 = 1.0;
  double K2 = 0.0;
  double K3 = 0.0;
  ExponentConfig exponents;

  double sigma() const { return exponents.sigma; }
  void validate() const;
};

/// Constants of the weight class a(x) <= c6 a(x~) + c5 |x - x~|^sigma.
struct ZsigmaConstants {
  double c5 = 0.0;
  double c6 = 1.0;
  double sigma = 1.0;

  /// c5 = c6 = 2^sigma (1 + h / (r2 - r1)^sigma); for step_holder r1 = 0, r2 = r.
  static ZsigmaConstants for_weight(const WeightSpec& w);
  void validate() const;
};

/// q <= p (1 + sigma / n), evaluated as sigma - n (q - p) / p >= 0.
bool check_F1(const ExponentConfig& cfg);
/// sigma - n (q - p) / p; nonnegative exactly when the exponent condition holds.
double f1_margin(const ExponentConfig& cfg);

/// Sampled (x, x~) pairs inside the open ball: straddling pairs around every breakpoint
/// (same breakpoint first, then across breakpoints), followed by lattice pairs. Exactly `budget` pairs.
std::vector<std::pair<Point, Point>> sample_point_pairs(const Ball& domain, std::size_t budget,
                                                        std::uint64_t seed,
                                                        std::span<const double> breakpoints);

/// Falsifier for the structure bound on sampled triples (x, x~, z). Reports the first violation.
ConditionReport check_F2_sampled(const DensitySpec& f, const StructureConstants& c, const Ball& domain,
                                 const SamplerConfig& sampler);

/// Midpoint convexity of z -> f(x, z) on sampled pairs (random pairs, pairs on a ray, and pairs
/// across the z_n^1 = 0 kink).
ConditionReport check_convexity_sampled(const DensitySpec& f, std::span<const double> x, int rows,
                                        const SamplerConfig& sampler);

/// Candidate minimizer y* of y -> f(y, z) over the closed ball, with its sampled certificate.
struct MinPointResult {
  Point y_star;
  ConditionReport report;
};

/// Picks y* among the closed-ball samples by a surrogate (the weight for product densities, -y_1 for
/// Example 2, the value summed over probe matrices otherwise; ties go to the lexicographically smallest
/// y), then verifies f(y*, z) <= f(y, z) on every sampled (y, z).
MinPointResult find_min_point_F4(const DensitySpec& f, std::span<const double> x, double eps,
                                 const Ball& domain, std::size_t y_budget, int rows,
                                 const SamplerConfig& z_sampler);

/// The surrogate ranking candidate minimum points: smaller is better.
double surrogate_score(const DensitySpec& f, std::span<const double> y, int rows);
/// Index of the surrogate minimizer among `candidates`, with the same tie-breaking as above.
std::size_t surrogate_argmin(const DensitySpec& f, std::span<const Point> candidates, int rows);

/// Falsifier for the weight class on sampled pairs.
ConditionReport check_Zsigma(const WeightSpec& w, const ZsigmaConstants& c, const Ball& domain,
                             const SamplerConfig& sampler);

}  // namespace dphase
