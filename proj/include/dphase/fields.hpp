#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dphase {

/// Largest supported spatial dimension n and target dimension N.
inline constexpr int kMaxDim = 3;
inline constexpr int kMaxTargetDim = 3;

/// Thrown when an operation is called outside its documented domain.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Point = std::vector<double>;

/// Closed or open ball B(center, radius); which one is meant is up to the caller.
struct Ball {
  Point center;
  double radius = 1.0;

  Ball() = default;
  Ball(Point c, double r);

  int dim() const { return static_cast<int>(center.size()); }
  double volume() const;
  bool contains(std::span<const double> x) const;
};

double distance(std::span<const double> a, std::span<const double> b);

/// Dense N x n matrix z; entry (alpha, i) is component alpha, direction i (both 0-based).
/// The entry written z_n^1 in index notation is (0, n - 1).
class GradientMatrix {
 public:
  GradientMatrix() = default;
  GradientMatrix(int rows, int cols);

  /// Matrix with a single nonzero entry.
  static GradientMatrix unit(int rows, int cols, int alpha, int i, double value = 1.0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return static_cast<std::size_t>(rows_ * cols_); }

  double& operator()(int alpha, int i) { return a_[static_cast<std::size_t>(alpha * cols_ + i)]; }
  double operator()(int alpha, int i) const { return a_[static_cast<std::size_t>(alpha * cols_ + i)]; }

  /// Entry (0, n - 1): first component, last direction.
  double top_last() const { return (*this)(0, cols_ - 1); }

  std::span<double> entries() { return {a_.data(), size()}; }
  std::span<const double> entries() const { return {a_.data(), size()}; }

  /// Frobenius norm.
  double norm() const;
  double dot(const GradientMatrix& other) const;
  bool finite() const;

  GradientMatrix operator-() const;
  GradientMatrix& operator+=(const GradientMatrix& other);
  GradientMatrix& operator-=(const GradientMatrix& other);
  GradientMatrix& operator*=(double s);
  friend GradientMatrix operator+(GradientMatrix a, const GradientMatrix& b) { return a += b; }
  friend GradientMatrix operator-(GradientMatrix a, const GradientMatrix& b) { return a -= b; }
  friend GradientMatrix operator*(double s, GradientMatrix a) { return a *= s; }

 private:
  void check_same_shape(const GradientMatrix& other) const;

  int rows_ = 0;
  int cols_ = 0;
  std::array<double, kMaxDim * kMaxTargetDim> a_{};
};

/// Uniform node-centered Cartesian grid. Node i along an axis sits at lower + i*h, i = 0..cells.
class Grid {
 public:
  Grid(std::vector<double> lower, std::vector<double> upper, std::vector<int> cells);

  /// [lo, hi]^dim with the same cell count on every axis.
  static Grid cube(int dim, double lo, double hi, int cells);

  int dim() const { return static_cast<int>(lower_.size()); }
  double spacing() const { return h_; }
  double cell_volume() const;
  double lower(int axis) const { return lower_[static_cast<std::size_t>(axis)]; }
  double upper(int axis) const { return upper_[static_cast<std::size_t>(axis)]; }
  int cells(int axis) const { return cells_[static_cast<std::size_t>(axis)]; }
  int nodes(int axis) const { return cells_[static_cast<std::size_t>(axis)] + 1; }
  std::size_t node_count() const { return node_count_; }

  /// Row-major flattening: the last axis varies fastest.
  std::size_t index(std::span<const int> multi) const;
  std::array<int, kMaxDim> multi_index(std::size_t node) const;
  double coordinate(int axis, int i) const { return lower(axis) + i * h_; }
  void coordinates(std::size_t node, std::span<double> x) const;
  Point point(std::size_t node) const;

  /// True iff the closed ball lies inside the grid box.
  bool contains(const Ball& b) const;
  bool is_interior(std::size_t node) const;

  /// Same box with every cell split into `factor` cells per axis.
  Grid refined(int factor) const;
  /// Sub-grid spanned by node indices [first, last] per axis (inclusive).
  Grid sub_grid(std::span<const int> first, std::span<const int> last) const;
  /// Node offset of this grid's origin inside `parent`, which must share spacing.
  std::array<int, kMaxDim> offset_in(const Grid& parent) const;

  /// Nodes whose (dual) cell center, i.e. the node itself, lies inside the open ball.
  std::vector<std::size_t> nodes_in_ball(const Ball& b) const;

  bool operator==(const Grid& other) const = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<int> cells_;
  double h_ = 0.0;
  std::size_t node_count_ = 0;
};

/// u: grid -> R^N evaluated at a point x (size n), written into out (size N).
using FieldFunction = std::function<void(std::span<const double> x, std::span<double> out)>;

/// Vector field sampled at grid nodes. Immutable after construction.
class SampledField {
 public:
  SampledField(Grid grid, int target_dim, std::vector<double> values);

  static SampledField sample(const Grid& grid, int target_dim, const FieldFunction& u);

  const Grid& grid() const { return grid_; }
  int target_dim() const { return target_dim_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> value(std::size_t node) const {
    return {values_.data() + node * static_cast<std::size_t>(target_dim_),
            static_cast<std::size_t>(target_dim_)};
  }
  /// Euclidean norm |u(node)|.
  double magnitude(std::size_t node) const;

 private:
  Grid grid_;
  int target_dim_;
  std::vector<double> values_;
};

/// One GradientMatrix per node, stored contiguously.
class GradientField {
 public:
  GradientField(Grid grid, int rows, std::vector<double> data);

  const Grid& grid() const { return grid_; }
  int rows() const { return rows_; }
  int cols() const { return grid_.dim(); }
  std::size_t stride() const { return static_cast<std::size_t>(rows_ * grid_.dim()); }
  std::span<const double> data() const { return data_; }

  GradientMatrix at(std::size_t node) const;
  double norm_at(std::size_t node) const;

 private:
  Grid grid_;
  int rows_;
  std::vector<double> data_;
};

/// Central differences at interior nodes, one-sided differences on the boundary faces.
GradientField discrete_gradient(const SampledField& u);

/// Midpoint-rule L^p norm over the nodes inside the ball. `values` holds one scalar per node.
double lp_norm(const Grid& grid, std::span<const double> values, double p, const Ball& region);
/// L^p norm of the Frobenius norm of a gradient field.
double lp_norm(const GradientField& g, double p, const Ball& region);
/// L^p norm of |u|.
double lp_norm(const SampledField& u, double p, const Ball& region);

/// u_k = u where |u| <= k, k u/|u| where |u| > k.
SampledField vectorial_truncation(const SampledField& u, double k);

/// Gradient of the truncated field at a point with |u| > k:
/// (k/|u|) [D_i u^a - (u^a/|u|) sum_b (u^b/|u|) D_i u^b].
GradientMatrix truncation_gradient_identity(std::span<const double> u, const GradientMatrix& du,
                                            double k);
GradientMatrix truncation_gradient_identity(const SampledField& u, const GradientField& du, double k,
                                            std::size_t node);

/// Chain-rule gradient of u_k: Du on {|u| <= k}, the identity above on {|u| > k}.
GradientField truncation_gradient_field(const SampledField& u, const GradientField& du, double k);

struct TruncationContraction {
  std::size_t nodes = 0;               ///< interior nodes checked
  std::size_t discrete_violations = 0;  ///< |D_h u_k| > |D_h u|
  std::size_t chain_rule_violations = 0;  ///< chain-rule gradient of u_k longer than D_h u
  double max_ratio = 0.0;              ///< max |D_h u_k| / |D_h u| over nodes with D_h u != 0
  bool passed() const { return discrete_violations == 0 && chain_rule_violations == 0; }
};

/// Compares |Du_k| with |Du| at every interior node, for both the discrete gradient of the truncated field
/// and the chain-rule gradient. The radial projection onto the closed k-ball is 1-Lipschitz, so both
/// comparisons hold up to rounding (tolerance 1e-12 relative).
TruncationContraction check_truncation_contraction(const SampledField& u, double k);

}  // namespace dphase
