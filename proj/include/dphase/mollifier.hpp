#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dphase/fields.hpp"

namespace dphase {

/// The standard bump phi(t) = C exp(-1 / (1 - |t|^2)) on the unit ball, rescaled to phi_eps.
struct MollifierSpec {
  double eps = 0.1;
};

/// exp(-1 / (1 - s2)) for s2 = |t|^2 < 1, else 0 (without the normalization constant).
double bump_profile(double s2);
/// The constant C making the bump integrate to 1 over the unit ball of R^n.
double bump_normalization(int n);
/// L^r norm of the normalized bump over the unit ball of R^n.
double bump_lp_norm(int n, double r);

/// Bump sampled at the offsets k with |k| h < eps, weights renormalized to sum to 1.
class DiscreteKernel {
 public:
  DiscreteKernel(int dim, double spacing, double eps);

  int dim() const { return dim_; }
  double eps() const { return eps_; }
  /// Largest |k_i| over the stencil.
  int reach() const { return reach_; }
  std::size_t size() const { return weights_.size(); }
  /// Offsets, dim() ints per stencil point.
  std::span<const int> offset(std::size_t k) const {
    return {offsets_.data() + k * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double weight(std::size_t k) const { return weights_[k]; }
  /// Discrete L^r norm of the weights read as a density: (sum (w/h^n)^r h^n)^{1/r}.
  double lp_norm(double r) const;

 private:
  int dim_;
  double eps_;
  double h_;
  int reach_ = 0;
  std::vector<int> offsets_;
  std::vector<double> weights_;
};

/// Nodes of `input` whose whole stencil lies in `input`, optionally cut down to the node box of `crop`.
/// Throws when eps < 2h, the region is empty, or the crop ball's nodes leave the shrunken region.
Grid mollified_grid(const Grid& input, const DiscreteKernel& kernel, const std::optional<Ball>& crop);

/// Discrete convolution u_eps(x) = sum_k w_k u(x - k h) on the shrunken grid.
SampledField mollify(const SampledField& u, const MollifierSpec& m, const std::optional<Ball>& crop = {});
/// Component-wise convolution of a gradient field. Away from the boundary faces this equals the central
/// difference gradient of the mollified field, since both operators are shift invariant.
GradientField mollify(const GradientField& g, const MollifierSpec& m, const std::optional<Ball>& crop = {});
/// Convolution of `stride` values per node onto `out` (a grid returned by mollified_grid).
std::vector<double> convolve(const Grid& input, std::span<const double> data, std::size_t stride,
                             const DiscreteKernel& kernel, const Grid& out);

}  // namespace dphase
