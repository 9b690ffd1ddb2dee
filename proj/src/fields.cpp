#include "dphase/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

namespace dphase {

Ball::Ball(Point c, double r) : center(std::move(c)), radius(r) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw PreconditionError(fmt::format("ball radius must be positive, got {}", radius));
  }
  if (center.empty()) throw PreconditionError("ball center must have at least one coordinate");
}

double Ball::volume() const {
  const double n = dim();
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0) * std::pow(radius, n);
}

bool Ball::contains(std::span<const double> x) const { return distance(center, x) < radius; }

double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PreconditionError("distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// --- GradientMatrix ---------------------------------------------------------

GradientMatrix::GradientMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || rows > kMaxTargetDim || cols < 1 || cols > kMaxDim) {
    throw PreconditionError(fmt::format("gradient matrix shape {}x{} unsupported", rows, cols));
  }
}

GradientMatrix GradientMatrix::unit(int rows, int cols, int alpha, int i, double value) {
  GradientMatrix z(rows, cols);
  z(alpha, i) = value;
  return z;
}

double GradientMatrix::norm() const {
  double s = 0.0;
  for (double v : entries()) s += v * v;
  return std::sqrt(s);
}

double GradientMatrix::dot(const GradientMatrix& other) const {
  check_same_shape(other);
  double s = 0.0;
  for (std::size_t k = 0; k < size(); ++k) s += a_[k] * other.a_[k];
  return s;
}

bool GradientMatrix::finite() const {
  return std::all_of(a_.begin(), a_.begin() + static_cast<std::ptrdiff_t>(size()),
                     [](double v) { return std::isfinite(v); });
}

GradientMatrix GradientMatrix::operator-() const {
  GradientMatrix r = *this;
  for (double& v : r.entries()) v = -v;
  return r;
}

GradientMatrix& GradientMatrix::operator+=(const GradientMatrix& other) {
  check_same_shape(other);
  for (std::size_t k = 0; k < size(); ++k) a_[k] += other.a_[k];
  return *this;
}

GradientMatrix& GradientMatrix::operator-=(const GradientMatrix& other) {
  check_same_shape(other);
  for (std::size_t k = 0; k < size(); ++k) a_[k] -= other.a_[k];
  return *this;
}

GradientMatrix& GradientMatrix::operator*=(double s) {
  for (double& v : entries()) v *= s;
  return *this;
}

void GradientMatrix::check_same_shape(const GradientMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw PreconditionError("gradient matrix shape mismatch");
  }
}

// --- Grid -------------------------------------------------------------------

Grid::Grid(std::vector<double> lower, std::vector<double> upper, std::vector<int> cells)
    : lower_(std::move(lower)), upper_(std::move(upper)), cells_(std::move(cells)) {
  const auto n = lower_.size();
  if (n < 1 || n > static_cast<std::size_t>(kMaxDim) || upper_.size() != n || cells_.size() != n) {
    throw PreconditionError("grid: inconsistent or unsupported dimension");
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (cells_[a] < 2) throw PreconditionError("grid: every axis needs at least 2 cells");
    if (!(upper_[a] > lower_[a])) throw PreconditionError("grid: upper bound must exceed lower bound");
  }
  h_ = (upper_[0] - lower_[0]) / cells_[0];
  for (std::size_t a = 1; a < n; ++a) {
    const double ha = (upper_[a] - lower_[a]) / cells_[a];
    if (std::abs(ha - h_) > 1e-12 * h_) {
      throw PreconditionError(fmt::format("grid: spacing differs between axes ({} vs {})", h_, ha));
    }
  }
  node_count_ = 1;
  for (int c : cells_) node_count_ *= static_cast<std::size_t>(c + 1);
}

Grid Grid::cube(int dim, double lo, double hi, int cells) {
  return Grid(std::vector<double>(static_cast<std::size_t>(dim), lo),
              std::vector<double>(static_cast<std::size_t>(dim), hi),
              std::vector<int>(static_cast<std::size_t>(dim), cells));
}

double Grid::cell_volume() const { return std::pow(h_, dim()); }

std::size_t Grid::index(std::span<const int> multi) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim(); ++a) idx = idx * static_cast<std::size_t>(nodes(a)) + static_cast<std::size_t>(multi[static_cast<std::size_t>(a)]);
  return idx;
}

std::array<int, kMaxDim> Grid::multi_index(std::size_t node) const {
  std::array<int, kMaxDim> m{};
  for (int a = dim() - 1; a >= 0; --a) {
    const auto na = static_cast<std::size_t>(nodes(a));
    m[static_cast<std::size_t>(a)] = static_cast<int>(node % na);
    node /= na;
  }
  return m;
}

void Grid::coordinates(std::size_t node, std::span<double> x) const {
  const auto m = multi_index(node);
  for (int a = 0; a < dim(); ++a) x[static_cast<std::size_t>(a)] = coordinate(a, m[static_cast<std::size_t>(a)]);
}

Point Grid::point(std::size_t node) const {
  Point x(static_cast<std::size_t>(dim()));
  coordinates(node, x);
  return x;
}

bool Grid::contains(const Ball& b) const {
  if (b.dim() != dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    const double c = b.center[static_cast<std::size_t>(a)];
    if (c - b.radius < lower(a) || c + b.radius > upper(a)) return false;
  }
  return true;
}

bool Grid::is_interior(std::size_t node) const {
  const auto m = multi_index(node);
  for (int a = 0; a < dim(); ++a) {
    const int i = m[static_cast<std::size_t>(a)];
    if (i == 0 || i == cells(a)) return false;
  }
  return true;
}

Grid Grid::refined(int factor) const {
  std::vector<int> c = cells_;
  for (int& v : c) v *= factor;
  return Grid(lower_, upper_, std::move(c));
}

Grid Grid::sub_grid(std::span<const int> first, std::span<const int> last) const {
  std::vector<double> lo(static_cast<std::size_t>(dim())), hi(lo.size());
  std::vector<int> c(lo.size());
  for (int a = 0; a < dim(); ++a) {
    const auto s = static_cast<std::size_t>(a);
    if (first[s] < 0 || last[s] > cells(a) || last[s] - first[s] < 2) {
      throw PreconditionError("sub_grid: index range invalid or fewer than 2 cells");
    }
    lo[s] = coordinate(a, first[s]);
    hi[s] = coordinate(a, last[s]);
    c[s] = last[s] - first[s];
  }
  return Grid(std::move(lo), std::move(hi), std::move(c));
}

std::array<int, kMaxDim> Grid::offset_in(const Grid& parent) const {
  if (parent.dim() != dim() || std::abs(parent.spacing() - h_) > 1e-12 * h_) {
    throw PreconditionError("offset_in: grids do not share spacing");
  }
  std::array<int, kMaxDim> off{};
  for (int a = 0; a < dim(); ++a) {
    const double shift = (lower(a) - parent.lower(a)) / h_;
    const double rounded = std::round(shift);
    if (std::abs(shift - rounded) > 1e-8) throw PreconditionError("offset_in: grids are not aligned");
    off[static_cast<std::size_t>(a)] = static_cast<int>(rounded);
  }
  return off;
}

std::vector<std::size_t> Grid::nodes_in_ball(const Ball& b) const {
  if (b.dim() != dim()) throw PreconditionError("nodes_in_ball: dimension mismatch");
  std::vector<std::size_t> out;
  Point x(static_cast<std::size_t>(dim()));
  for (std::size_t node = 0; node < node_count_; ++node) {
    coordinates(node, x);
    if (b.contains(x)) out.push_back(node);
  }
  return out;
}

// --- SampledField -----------------------------------------------------------

SampledField::SampledField(Grid grid, int target_dim, std::vector<double> values)
    : grid_(std::move(grid)), target_dim_(target_dim), values_(std::move(values)) {
  if (target_dim_ < 1 || target_dim_ > kMaxTargetDim) {
    throw PreconditionError(fmt::format("target dimension {} unsupported", target_dim_));
  }
  if (values_.size() != grid_.node_count() * static_cast<std::size_t>(target_dim_)) {
    throw PreconditionError(fmt::format("field has {} values, expected {} nodes x {} components",
                                        values_.size(), grid_.node_count(), target_dim_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw PreconditionError("field values must be finite");
  }
}

SampledField SampledField::sample(const Grid& grid, int target_dim, const FieldFunction& u) {
  std::vector<double> vals(grid.node_count() * static_cast<std::size_t>(target_dim));
  Point x(static_cast<std::size_t>(grid.dim()));
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    grid.coordinates(node, x);
    u(x, std::span<double>(vals.data() + node * static_cast<std::size_t>(target_dim),
                           static_cast<std::size_t>(target_dim)));
  }
  return SampledField(grid, target_dim, std::move(vals));
}

double SampledField::magnitude(std::size_t node) const {
  double s = 0.0;
  for (double v : value(node)) s += v * v;
  return std::sqrt(s);
}

// --- GradientField ----------------------------------------------------------

GradientField::GradientField(Grid grid, int rows, std::vector<double> data)
    : grid_(std::move(grid)), rows_(rows), data_(std::move(data)) {
  if (rows_ < 1 || rows_ > kMaxTargetDim) throw PreconditionError("gradient field: bad row count");
  if (data_.size() != grid_.node_count() * stride()) {
    throw PreconditionError("gradient field: data size does not match grid");
  }
}

GradientMatrix GradientField::at(std::size_t node) const {
  GradientMatrix z(rows_, cols());
  const double* src = data_.data() + node * stride();
  std::copy(src, src + stride(), z.entries().begin());
  return z;
}

double GradientField::norm_at(std::size_t node) const {
  const double* src = data_.data() + node * stride();
  double s = 0.0;
  for (std::size_t k = 0; k < stride(); ++k) s += src[k] * src[k];
  return std::sqrt(s);
}

GradientField discrete_gradient(const SampledField& u) {
  const Grid& g = u.grid();
  const int n = g.dim();
  const int N = u.target_dim();
  const double h = g.spacing();
  const auto stride = static_cast<std::size_t>(N * n);
  std::vector<double> out(g.node_count() * stride);

  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const auto m = g.multi_index(node);
    for (int i = 0; i < n; ++i) {
      auto lo = m, hi = m;
      double span = 2.0 * h;
      const int mi = m[static_cast<std::size_t>(i)];
      if (mi == 0) {
        hi[static_cast<std::size_t>(i)] = 1;
        span = h;
      } else if (mi == g.cells(i)) {
        lo[static_cast<std::size_t>(i)] = mi - 1;
        span = h;
      } else {
        lo[static_cast<std::size_t>(i)] = mi - 1;
        hi[static_cast<std::size_t>(i)] = mi + 1;
      }
      const auto vlo = u.value(g.index(std::span<const int>(lo.data(), static_cast<std::size_t>(n))));
      const auto vhi = u.value(g.index(std::span<const int>(hi.data(), static_cast<std::size_t>(n))));
      for (int a = 0; a < N; ++a) {
        out[node * stride + static_cast<std::size_t>(a * n + i)] =
            (vhi[static_cast<std::size_t>(a)] - vlo[static_cast<std::size_t>(a)]) / span;
      }
    }
  }
  return GradientField(g, N, std::move(out));
}

double lp_norm(const Grid& grid, std::span<const double> values, double p, const Ball& region) {
  if (!(p >= 1.0)) throw PreconditionError("lp_norm: p must be at least 1");
  if (values.size() != grid.node_count()) throw PreconditionError("lp_norm: one value per node expected");
  if (!grid.contains(region)) throw PreconditionError("lp_norm: ball not contained in grid bounds");
  double s = 0.0;
  for (std::size_t node : grid.nodes_in_ball(region)) s += std::pow(std::abs(values[node]), p);
  return std::pow(s * grid.cell_volume(), 1.0 / p);
}

double lp_norm(const GradientField& g, double p, const Ball& region) {
  std::vector<double> norms(g.grid().node_count());
  for (std::size_t node = 0; node < norms.size(); ++node) norms[node] = g.norm_at(node);
  return lp_norm(g.grid(), norms, p, region);
}

double lp_norm(const SampledField& u, double p, const Ball& region) {
  std::vector<double> norms(u.grid().node_count());
  for (std::size_t node = 0; node < norms.size(); ++node) norms[node] = u.magnitude(node);
  return lp_norm(u.grid(), norms, p, region);
}

SampledField vectorial_truncation(const SampledField& u, double k) {
  if (!(k > 0.0)) throw PreconditionError("vectorial_truncation: level k must be positive");
  std::vector<double> out(u.values().begin(), u.values().end());
  const auto N = static_cast<std::size_t>(u.target_dim());
  for (std::size_t node = 0; node < u.grid().node_count(); ++node) {
    const double mag = u.magnitude(node);
    if (mag > k) {
      for (std::size_t a = 0; a < N; ++a) out[node * N + a] *= k / mag;
    }
  }
  return SampledField(u.grid(), u.target_dim(), std::move(out));
}

GradientMatrix truncation_gradient_identity(std::span<const double> u, const GradientMatrix& du,
                                            double k) {
  if (static_cast<int>(u.size()) != du.rows()) throw PreconditionError("truncation identity: shape mismatch");
  double mag = 0.0;
  for (double v : u) mag += v * v;
  mag = std::sqrt(mag);
  if (!(k > 0.0) || !(mag > k)) {
    throw PreconditionError("truncation identity applies only where |u| > k > 0");
  }
  GradientMatrix out(du.rows(), du.cols());
  for (int i = 0; i < du.cols(); ++i) {
    double radial = 0.0;  // sum_b (u^b/|u|) D_i u^b
    for (int b = 0; b < du.rows(); ++b) radial += u[static_cast<std::size_t>(b)] / mag * du(b, i);
    for (int a = 0; a < du.rows(); ++a) {
      out(a, i) = k / mag * (du(a, i) - u[static_cast<std::size_t>(a)] / mag * radial);
    }
  }
  return out;
}

GradientMatrix truncation_gradient_identity(const SampledField& u, const GradientField& du, double k,
                                            std::size_t node) {
  return truncation_gradient_identity(u.value(node), du.at(node), k);
}

GradientField truncation_gradient_field(const SampledField& u, const GradientField& du, double k) {
  if (!(k > 0.0)) throw PreconditionError("truncation_gradient_field: level k must be positive");
  if (!(u.grid() == du.grid()) || u.target_dim() != du.rows()) {
    throw PreconditionError("truncation_gradient_field: field and gradient do not match");
  }
  std::vector<double> out(du.data().begin(), du.data().end());
  const std::size_t stride = du.stride();
  for (std::size_t node = 0; node < u.grid().node_count(); ++node) {
    if (u.magnitude(node) > k) {
      const GradientMatrix t = truncation_gradient_identity(u.value(node), du.at(node), k);
      std::copy(t.entries().begin(), t.entries().end(), out.begin() + static_cast<std::ptrdiff_t>(node * stride));
    }
  }
  return GradientField(du.grid(), du.rows(), std::move(out));
}

TruncationContraction check_truncation_contraction(const SampledField& u, double k) {
  const GradientField du = discrete_gradient(u);
  const GradientField duk = discrete_gradient(vectorial_truncation(u, k));
  const GradientField chain = truncation_gradient_field(u, du, k);
  auto exceeds = [](double a, double b) { return a - b > 1e-12 * std::max(1.0, b); };
  TruncationContraction out;
  for (std::size_t node = 0; node < u.grid().node_count(); ++node) {
    if (!u.grid().is_interior(node)) continue;
    ++out.nodes;
    const double base = du.norm_at(node);
    const double trunc = duk.norm_at(node);
    if (exceeds(trunc, base)) ++out.discrete_violations;
    if (exceeds(chain.norm_at(node), base)) ++out.chain_rule_violations;
    if (base > 0.0) out.max_ratio = std::max(out.max_ratio, trunc / base);
  }
  return out;
}

}  // namespace dphase
