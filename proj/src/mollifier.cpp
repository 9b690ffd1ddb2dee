#include "dphase/mollifier.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace dphase {

namespace {

// Integral over the unit ball of F(|t|), written as a radial integral with composite Simpson.
template <class F>
double radial_integral(int n, F&& g) {
  const double sphere = 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
  constexpr int m = 20000;
  const double dr = 1.0 / m;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double r = i * dr;
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    s += w * g(r) * std::pow(r, n - 1);
  }
  return sphere * s * dr / 3.0;
}

}  // namespace

double bump_profile(double s2) { return s2 < 1.0 ? std::exp(-1.0 / (1.0 - s2)) : 0.0; }

double bump_normalization(int n) {
  if (n < 1 || n > kMaxDim) throw PreconditionError("bump_normalization: unsupported dimension");
  return 1.0 / radial_integral(n, [](double r) { return bump_profile(r * r); });
}

double bump_lp_norm(int n, double r) {
  if (!(r >= 1.0)) throw PreconditionError("bump_lp_norm: exponent must be >= 1");
  const double c = bump_normalization(n);
  const double s = radial_integral(n, [&](double t) { return std::pow(c * bump_profile(t * t), r); });
  return std::pow(s, 1.0 / r);
}

DiscreteKernel::DiscreteKernel(int dim, double spacing, double eps) : dim_(dim), eps_(eps), h_(spacing) {
  if (!(spacing > 0.0)) throw PreconditionError("kernel spacing must be positive");
  if (!(eps >= 2.0 * spacing)) {
    throw PreconditionError(
        fmt::format("eps = {} is below 2 grid spacings ({}); the kernel is not resolved", eps, 2.0 * spacing));
  }
  const double ratio = eps / spacing;
  reach_ = static_cast<int>(std::ceil(ratio)) - 1;
  const int width = 2 * reach_ + 1;
  int total = 1;
  for (int a = 0; a < dim; ++a) total *= width;
  double sum = 0.0;
  std::array<int, kMaxDim> k{};
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    double s2 = 0.0;
    for (int a = dim - 1; a >= 0; --a) {
      k[static_cast<std::size_t>(a)] = rem % width - reach_;
      rem /= width;
      const double t = k[static_cast<std::size_t>(a)] / ratio;
      s2 += t * t;
    }
    if (s2 >= 1.0) continue;
    const double w = bump_profile(s2);
    offsets_.insert(offsets_.end(), k.begin(), k.begin() + dim);
    weights_.push_back(w);
    sum += w;
  }
  for (double& w : weights_) w /= sum;
}

double DiscreteKernel::lp_norm(double r) const {
  const double cell = std::pow(h_, dim_);
  double s = 0.0;
  for (double w : weights_) s += std::pow(w / cell, r) * cell;
  return std::pow(s, 1.0 / r);
}

Grid mollified_grid(const Grid& input, const DiscreteKernel& kernel, const std::optional<Ball>& crop) {
  const int n = input.dim();
  if (kernel.dim() != n) throw PreconditionError("kernel and grid dimensions differ");
  std::vector<int> first(static_cast<std::size_t>(n)), last(first.size());
  for (int a = 0; a < n; ++a) {
    const auto s = static_cast<std::size_t>(a);
    first[s] = kernel.reach();
    last[s] = input.cells(a) - kernel.reach();
  }
  if (crop) {
    if (crop->dim() != n) throw PreconditionError("crop ball dimension differs from the grid");
    const double h = input.spacing();
    for (int a = 0; a < n; ++a) {
      const auto s = static_cast<std::size_t>(a);
      const double lo = crop->center[s] - crop->radius - input.lower(a);
      const double hi = crop->center[s] + crop->radius - input.lower(a);
      const int cf = static_cast<int>(std::floor(lo / h));
      const int cl = static_cast<int>(std::ceil(hi / h));
      if (cf < first[s] || cl > last[s]) {
        throw PreconditionError(fmt::format(
            "crop ball leaves the region where the eps = {} mollification is defined", kernel.eps()));
      }
      first[s] = cf;
      last[s] = cl;
    }
  }
  for (int a = 0; a < n; ++a) {
    const auto s = static_cast<std::size_t>(a);
    if (last[s] - first[s] < 2) {
      throw PreconditionError(fmt::format("mollification with eps = {} leaves no output region", kernel.eps()));
    }
  }
  return input.sub_grid(first, last);
}

std::vector<double> convolve(const Grid& input, std::span<const double> data, std::size_t stride,
                             const DiscreteKernel& kernel, const Grid& out) {
  const int n = input.dim();
  const auto off = out.offset_in(input);
  // Flat index shift of every stencil point in the input grid.
  std::vector<std::ptrdiff_t> shift(kernel.size());
  std::array<std::ptrdiff_t, kMaxDim> axis_stride{};
  std::ptrdiff_t st = 1;
  for (int a = n - 1; a >= 0; --a) {
    axis_stride[static_cast<std::size_t>(a)] = st;
    st *= input.nodes(a);
  }
  for (std::size_t k = 0; k < kernel.size(); ++k) {
    std::ptrdiff_t d = 0;
    const auto o = kernel.offset(k);
    for (int a = 0; a < n; ++a) d -= o[static_cast<std::size_t>(a)] * axis_stride[static_cast<std::size_t>(a)];
    shift[k] = d;
  }
  std::vector<double> result(out.node_count() * stride, 0.0);
  std::array<int, kMaxDim> in_idx{};
  for (std::size_t node = 0; node < out.node_count(); ++node) {
    const auto m = out.multi_index(node);
    for (int a = 0; a < n; ++a) {
      const auto s = static_cast<std::size_t>(a);
      in_idx[s] = m[s] + off[s];
    }
    const auto base = static_cast<std::ptrdiff_t>(input.index(std::span<const int>(in_idx.data(), static_cast<std::size_t>(n))));
    double* dst = result.data() + node * stride;
    for (std::size_t k = 0; k < kernel.size(); ++k) {
      const double w = kernel.weight(k);
      const double* src = data.data() + static_cast<std::size_t>(base + shift[k]) * stride;
      for (std::size_t c = 0; c < stride; ++c) dst[c] += w * src[c];
    }
  }
  return result;
}

SampledField mollify(const SampledField& u, const MollifierSpec& m, const std::optional<Ball>& crop) {
  const DiscreteKernel kernel(u.grid().dim(), u.grid().spacing(), m.eps);
  Grid out = mollified_grid(u.grid(), kernel, crop);
  auto values = convolve(u.grid(), u.values(), static_cast<std::size_t>(u.target_dim()), kernel, out);
  return SampledField(std::move(out), u.target_dim(), std::move(values));
}

GradientField mollify(const GradientField& g, const MollifierSpec& m, const std::optional<Ball>& crop) {
  const DiscreteKernel kernel(g.grid().dim(), g.grid().spacing(), m.eps);
  Grid out = mollified_grid(g.grid(), kernel, crop);
  auto values = convolve(g.grid(), g.data(), g.stride(), kernel, out);
  return GradientField(std::move(out), g.rows(), std::move(values));
}

}  // namespace dphase
