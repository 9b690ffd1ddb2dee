#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dphase/fields.hpp"

namespace dphase {

enum class Verdict { pass_on_samples, fail };

/// Concrete data showing a sampled inequality lhs <= rhs is violated.
struct Witness {
  std::string relation;  ///< which inequality failed, e.g. "F2 upper"
  Point x;
  Point x_tilde;         ///< second point (x~, y, or y*); empty when unused
  std::optional<GradientMatrix> z;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ConditionReport {
  std::string condition;
  Verdict verdict = Verdict::pass_on_samples;
  std::optional<Witness> witness;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  /// Extra named quantities, in insertion order.
  std::vector<std::pair<std::string, std::string>> details;

  bool passed() const { return verdict == Verdict::pass_on_samples; }
  void add_detail(std::string key, std::string value) { details.emplace_back(std::move(key), std::move(value)); }
  void add_detail(std::string key, double value);

  /// `key: value` lines.
  std::string to_text() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

/// True when lhs exceeds rhs by more than 1e-12, relative to the larger magnitude (at least 1).
bool violates(double lhs, double rhs, double tol = 1e-12);

std::string format_point(const Point& x);
std::string format_matrix(const GradientMatrix& z);

}  // namespace dphase
