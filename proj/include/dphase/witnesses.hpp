#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dphase/densities.hpp"

namespace dphase {

/// Step-by-step record of a counterexample computation.
struct Transcript {
  std::string name;
  bool conclusive = false;
  std::string conclusion;
  std::optional<double> t;  ///< the witnessing scan parameter, when there is one
  std::vector<std::pair<std::string, std::string>> steps;

  void add(std::string key, std::string value) { steps.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, double value);
  std::string to_text() const;
};

/// z = e_{1n} (first component, last direction) against -z: a density of the form g(x, |z|) would give
/// f(x, z) = f(x, -z). Throws when the two values agree at x.
Transcript witness_non_uhlenbeck(const DensitySpec& f, std::span<const double> x, int rows);

struct RivalStructureSpec {
  enum class Kind { bcdfm, bcm, hh };
  Kind kind = Kind::hh;
  // nu1 (|z|^pt + at |z|^qt) <= f(x, z) <= nu2 (|z|^pt + at |z|^qt)
  double nu1 = 1.0;
  double nu2 = 1.0;
  double p_tilde = 1.0;
  double q_tilde = 1.0;
  double a_tilde = 0.0;
  // nu M(x, beta z) <= f(x, z) <= L (M(x, z) + g(x)) with M even in z; also the HH constant L.
  double nu = 0.5;
  double beta = 0.5;
  double L = 2.0;
  double g_value = 0.0;

  void validate() const;
};

/// Values of t tried in order: start, start + step, ... (linear) or start, start * factor, ... (geometric).
struct TScan {
  enum class Kind { linear, geometric };
  Kind kind = Kind::geometric;
  double start = 1.0;
  double step = 2.0;  ///< additive step or multiplicative factor
  int count = 11;

  std::vector<double> values() const;
};

/// Scans t and returns the first value at which the rival structure inequality fails at x:
///  bcdfm: lower bound along t e_{11} (where f = t^p), upper bound along t e_{1n};
///  bcm:   f(x, beta t e_{1n}) <= L (t^p / nu + g), the reduction that uses the evenness of M;
///  hh:    |z'| |A(x, z')| <= L A(x, z) : z with z' = t e_{1n}, z = -z', A = D_z f.
/// An exhausted scan yields conclusive = false.
Transcript witness_rival_structure_failure(const DensitySpec& f, std::span<const double> x, int rows,
                                           const RivalStructureSpec& rival, const TScan& scan);

/// Evaluates the probe pattern showing that g(x_1, t) is not a product a(x_1) h(t), at t > 0.
Transcript witness_non_product(double q, double t);

}  // namespace dphase
