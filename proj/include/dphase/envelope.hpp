#pragma once

#include <span>
#include <vector>

#include "dphase/conditions.hpp"

namespace dphase {

/// Certified bounds on (f^-_{x,eps})^{**}(z) or on f^-_{x,eps}(z) at one (x, eps, z).
struct EnvelopeBracket {
  double lower = 0.0;
  double upper = 0.0;
};

/// The local infimum y -> f(y, z) over B(x, eps), represented by sampled points of the open ball and a
/// minimum point y* certified on the samples.
///
/// Lower bound: f(y*, z), which is convex in z and lies below f(y, z) for every y, hence below the
/// biconjugate. It is used only when the certificate passed and y* does not beat the open-ball samples
/// at this z by more than rounding; otherwise the lower bound falls back to 0 (f >= 0).
/// Upper bound: the minimum over the open-ball samples, which bounds the essential infimum from above.
class LocalInfimum {
 public:
  LocalInfimum(const DensitySpec& f, std::span<const double> x, double eps, const Ball& domain,
               std::size_t y_budget, int rows, const SamplerConfig& z_sampler);

  const Point& y_star() const { return y_star_; }
  bool certified() const { return certificate_.passed(); }
  const ConditionReport& certificate() const { return certificate_; }
  const std::vector<Point>& open_samples() const { return open_samples_; }

  EnvelopeBracket bracket(const GradientMatrix& z) const;

 private:
  DensitySpec f_;
  Point y_star_;
  ConditionReport certificate_;
  std::vector<Point> open_samples_;
};

EnvelopeBracket essinf_bracket(const LocalInfimum& li, const GradientMatrix& z);
EnvelopeBracket biconjugate_bracket(const LocalInfimum& li, const GradientMatrix& z);

/// Parameters of the implication
///   |z|^alpha + (f^-_{x,eps})^{**}(z) <= L eps^{-n}  ==>  f(x, z) <= A [(f^-_{x,eps})^{**}(z) + b + |z|^p]
/// with theta fixed to 1.
struct HPropertyParams {
  double alpha = 2.0;
  double L = 1.0;
  double A = 1.0;
  double b = 0.0;
  double eps_star = 0.5;

  /// alpha = p, A = K1 + K2 L^{(q-p)/p}, b = K3.
  static HPropertyParams from_structure(const StructureConstants& c, double L, double eps_star = 0.5);
  void validate() const;
};

/// Sampled check of the implication at one (x, eps). Premises are decided with the upper bracket and
/// conclusions with the lower bracket, so a pass is a certificate on the samples. Alongside, checks
/// eps^sigma |z|^q <= L^{(q-p)/p} |z|^p (relative tolerance 1e-9) wherever |z|^p <= L eps^{-n}.
/// The z samples are the sampler's list followed by 64 of its directions rescaled to the premise
/// boundary |z|^p = L eps^{-n}. Every z is checked; the witness is the first failure, and the counts
/// of both kinds of failure are reported as details.
ConditionReport check_H_property(const DensitySpec& f, const HPropertyParams& params,
                                 const StructureConstants& c, std::span<const double> x, double eps,
                                 const Ball& domain, const SamplerConfig& z_sampler,
                                 std::size_t y_budget = 256);

}  // namespace dphase
