#include "dphase/lavrentiev.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "dphase/conditions.hpp"
#include "dphase/mollifier.hpp"

namespace dphase {

SimplexEnergy::SimplexEnergy(DensitySpec f, Grid grid, int target_dim)
    : f_(std::move(f)), grid_(std::move(grid)), target_dim_(target_dim) {
  const int n = grid_.dim();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  std::size_t cells = 1;
  for (int a = 0; a < n; ++a) cells *= static_cast<std::size_t>(grid_.cells(a));
  simplex_count_ = cells * perms.size();
  volume_ = grid_.cell_volume() / static_cast<double>(perms.size());
  vertices_.reserve(simplex_count_ * static_cast<std::size_t>(n + 1));
  axes_.reserve(simplex_count_ * static_cast<std::size_t>(n));
  barycenters_.reserve(simplex_count_ * static_cast<std::size_t>(n));

  std::array<int, kMaxDim> c{};
  std::array<int, kMaxDim> v{};
  const std::span<const int> vs(v.data(), static_cast<std::size_t>(n));
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::size_t rem = cell;
    for (int a = n - 1; a >= 0; --a) {
      const auto s = static_cast<std::size_t>(a);
      c[s] = static_cast<int>(rem % static_cast<std::size_t>(grid_.cells(a)));
      rem /= static_cast<std::size_t>(grid_.cells(a));
    }
    for (const auto& pm : perms) {
      v = c;
      std::array<double, kMaxDim> bc{};
      vertices_.push_back(grid_.index(vs));
      for (int a = 0; a < n; ++a) bc[static_cast<std::size_t>(a)] += v[static_cast<std::size_t>(a)];
      for (int j = 0; j < n; ++j) {
        const int axis = pm[static_cast<std::size_t>(j)];
        ++v[static_cast<std::size_t>(axis)];
        vertices_.push_back(grid_.index(vs));
        axes_.push_back(axis);
        for (int a = 0; a < n; ++a) bc[static_cast<std::size_t>(a)] += v[static_cast<std::size_t>(a)];
      }
      for (int a = 0; a < n; ++a) {
        barycenters_.push_back(grid_.lower(a) + grid_.spacing() * bc[static_cast<std::size_t>(a)] / (n + 1));
      }
    }
  }
}

double SimplexEnergy::evaluate(std::span<const double> u, std::span<double> grad) const {
  const int n = grid_.dim();
  const auto N = static_cast<std::size_t>(target_dim_);
  const double inv_h = 1.0 / grid_.spacing();
  // Neumaier summation: near a minimizer the line search compares energies that differ in the last digits.
  double total = 0.0;
  double carry = 0.0;
  GradientMatrix z(target_dim_, n);
  for (std::size_t s = 0; s < simplex_count_; ++s) {
    const std::size_t* vert = vertices_.data() + s * static_cast<std::size_t>(n + 1);
    const int* ax = axes_.data() + s * static_cast<std::size_t>(n);
    const std::span<const double> b(barycenters_.data() + s * static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      for (std::size_t a = 0; a < N; ++a) {
        z(static_cast<int>(a), ax[j]) = (u[vert[j + 1] * N + a] - u[vert[j] * N + a]) * inv_h;
      }
    }
    const double term = volume_ * eval_density(f_, b, z);
    const double t = total + term;
    carry += std::abs(total) >= std::abs(term) ? (total - t) + term : (term - t) + total;
    total = t;
    if (!grad.empty()) {
      const GradientMatrix gz = density_gradient(f_, b, z);
      for (int j = 0; j < n; ++j) {
        for (std::size_t a = 0; a < N; ++a) {
          const double g = volume_ * inv_h * gz(static_cast<int>(a), ax[j]);
          grad[vert[j + 1] * N + a] += g;
          grad[vert[j] * N + a] -= g;
        }
      }
    }
  }
  return total + carry;
}

namespace {

DescentLog make_log(const LbfgsResult& r) {
  DescentLog log;
  log.iterations = r.iterations;
  log.grad_norm = r.grad_norm;
  log.converged = r.converged;
  log.stop_reason = r.stop_reason;
  log.energies = r.history;
  for (std::size_t k = 1; k < r.history.size(); ++k) {
    if (r.history[k] > r.history[k - 1]) log.monotone = false;
  }
  return log;
}

// Distance of a node to the boundary of the box, in units of h (minimum over axes and sides).
int boundary_distance(const Grid& grid, std::size_t node) {
  const auto m = grid.multi_index(node);
  int d = grid.cells(0);
  for (int a = 0; a < grid.dim(); ++a) {
    const int i = m[static_cast<std::size_t>(a)];
    d = std::min({d, i, grid.cells(a) - i});
  }
  return d;
}

}  // namespace

bool LavrentievProbeResult::all_converged() const {
  return std::all_of(levels.begin(), levels.end(),
                     [](const LavrentievLevel& l) { return l.full.converged && l.smooth.converged; });
}

bool LavrentievProbeResult::subclass_consistent() const {
  return std::all_of(levels.begin(), levels.end(),
                     [](const LavrentievLevel& l) { return l.inf_smooth >= l.inf_full - 1e-8; });
}

bool LavrentievProbeResult::gaps_decreasing() const {
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (!(levels[k].rel_gap < levels[k - 1].rel_gap)) return false;
  }
  return true;
}

void LavrentievProbeResult::write_csv(std::ostream& os, const std::vector<std::string>& metadata) const {
  for (const auto& m : metadata) os << "# " << m << '\n';
  os << fmt::format("# density: {}\n", density);
  os << "# columns: cells per axis, mesh size h, mollification radius of the smooth class, infimum over all "
        "nodal fields, infimum over the smooth class, gap, gap relative to the full infimum, Lp distance of "
        "the two minimizers, iterations and convergence flag of each descent\n";
  os << "cells,h,eps_y,inf_full,inf_smooth,gap,rel_gap,lp_distance,full_iterations,full_converged,"
        "smooth_iterations,smooth_converged\n";
  for (const auto& l : levels) {
    os << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", l.cells, l.h, l.eps_y, l.inf_full, l.inf_smooth,
                      l.gap, l.rel_gap, l.lp_distance, l.full.iterations, l.full.converged ? 1 : 0,
                      l.smooth.iterations, l.smooth.converged ? 1 : 0);
  }
}

std::string LavrentievProbeResult::summary() const {
  std::string out = fmt::format("density: {}\n", density);
  for (const auto& l : levels) {
    out += fmt::format("level {}: inf_full={} inf_smooth={} rel_gap={} converged={}/{}\n", l.cells, l.inf_full,
                       l.inf_smooth, l.rel_gap, l.full.converged ? "yes" : "no", l.smooth.converged ? "yes" : "no");
  }
  out += fmt::format("all_converged: {}\nsubclass_consistent: {}\ngaps_decreasing: {}\n", all_converged(),
                     subclass_consistent(), gaps_decreasing());
  return out;
}

LavrentievProbeResult lavrentiev_probe(const DensitySpec& f, const FieldFunction& boundary,
                                       const LavrentievSetup& setup) {
  const int n = setup.dim;
  const int N = setup.target_dim;
  if (n < 1 || n > kMaxDim || N < 1 || N > kMaxTargetDim) throw PreconditionError("unsupported dimensions");
  if (setup.meshes.empty()) throw PreconditionError("at least one mesh is required");
  {
    SamplerConfig sc;
    sc.budget = 300;
    Point center(static_cast<std::size_t>(n), 0.5 * (setup.lower + setup.upper));
    const auto conv = check_convexity_sampled(f, center, N, sc);
    if (!conv.passed()) throw PreconditionError("the density failed the sampled convexity check");
  }

  LavrentievProbeResult res;
  res.density = density_name(f);
  res.p = lower_exponent(f);
  const auto NN = static_cast<std::size_t>(N);

  for (int cells : setup.meshes) {
    const Grid grid = Grid::cube(n, setup.lower, setup.upper, cells);
    const SimplexEnergy E(f, grid, N);
    const std::size_t nodes = grid.node_count();
    std::vector<double> base(nodes * NN);
    Point x(static_cast<std::size_t>(n));
    for (std::size_t node = 0; node < nodes; ++node) {
      grid.coordinates(node, x);
      boundary(x, std::span<double>(base.data() + node * NN, NN));
    }

    LavrentievLevel lvl;
    lvl.cells = cells;
    lvl.h = grid.spacing();
    lvl.eps_y = setup.eps_factor * grid.spacing();

    // (i) all interior nodal values.
    std::vector<std::size_t> interior;
    for (std::size_t node = 0; node < nodes; ++node) {
      if (boundary_distance(grid, node) > 0) interior.push_back(node);
    }
    lvl.full_unknowns = interior.size() * NN;
    std::vector<double> work(nodes * NN), grad(nodes * NN);
    const Objective full_obj = [&](std::span<const double> v, std::span<double> g) {
      work = base;
      for (std::size_t k = 0; k < interior.size(); ++k) {
        for (std::size_t a = 0; a < NN; ++a) work[interior[k] * NN + a] = v[k * NN + a];
      }
      std::fill(grad.begin(), grad.end(), 0.0);
      const double e = E.evaluate(work, grad);
      for (std::size_t k = 0; k < interior.size(); ++k) {
        for (std::size_t a = 0; a < NN; ++a) g[k * NN + a] = grad[interior[k] * NN + a];
      }
      return e;
    };
    std::vector<double> v0(lvl.full_unknowns);
    for (std::size_t k = 0; k < interior.size(); ++k) {
      for (std::size_t a = 0; a < NN; ++a) v0[k * NN + a] = base[interior[k] * NN + a];
    }
    const LbfgsResult full = lbfgs_minimize(full_obj, v0, setup.solver);
    lvl.inf_full = full.value;
    lvl.full = make_log(full);
    std::vector<double> u_full = base;
    for (std::size_t k = 0; k < interior.size(); ++k) {
      for (std::size_t a = 0; a < NN; ++a) u_full[interior[k] * NN + a] = full.x[k * NN + a];
    }

    // (ii) g + K v with v supported away from the boundary.
    const DiscreteKernel kernel(n, grid.spacing(), lvl.eps_y);
    std::vector<std::size_t> support;
    for (std::size_t node = 0; node < nodes; ++node) {
      if (boundary_distance(grid, node) * grid.spacing() >= lvl.eps_y * (1.0 - 1e-12)) support.push_back(node);
    }
    if (support.empty()) throw PreconditionError(fmt::format("mesh {} is too coarse for the smooth class", cells));
    lvl.smooth_unknowns = support.size() * NN;
    std::vector<std::ptrdiff_t> shift(kernel.size());
    {
      std::array<std::ptrdiff_t, kMaxDim> axis_stride{};
      std::ptrdiff_t st = 1;
      for (int a = n - 1; a >= 0; --a) {
        axis_stride[static_cast<std::size_t>(a)] = st;
        st *= grid.nodes(a);
      }
      for (std::size_t k = 0; k < kernel.size(); ++k) {
        std::ptrdiff_t d = 0;
        for (int a = 0; a < n; ++a) d += kernel.offset(k)[static_cast<std::size_t>(a)] * axis_stride[static_cast<std::size_t>(a)];
        shift[k] = d;
      }
    }
    // Scatter form of the convolution: v at y spreads w_k v(y) to y + k h. All targets stay inside the grid
    // because y is at least eps_Y away from the boundary and |k| h < eps_Y.
    auto smooth_field = [&](std::span<const double> v, std::vector<double>& u) {
      u = base;
      for (std::size_t j = 0; j < support.size(); ++j) {
        const auto y = static_cast<std::ptrdiff_t>(support[j]);
        for (std::size_t k = 0; k < kernel.size(); ++k) {
          const auto t = static_cast<std::size_t>(y + shift[k]);
          for (std::size_t a = 0; a < NN; ++a) u[t * NN + a] += kernel.weight(k) * v[j * NN + a];
        }
      }
    };
    const Objective smooth_obj = [&](std::span<const double> v, std::span<double> g) {
      smooth_field(v, work);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double e = E.evaluate(work, grad);
      for (std::size_t j = 0; j < support.size(); ++j) {
        const auto y = static_cast<std::ptrdiff_t>(support[j]);
        for (std::size_t a = 0; a < NN; ++a) {
          double s = 0.0;
          for (std::size_t k = 0; k < kernel.size(); ++k) {
            s += kernel.weight(k) * grad[static_cast<std::size_t>(y + shift[k]) * NN + a];
          }
          g[j * NN + a] = s;
        }
      }
      return e;
    };
    const LbfgsResult smooth = lbfgs_minimize(smooth_obj, std::vector<double>(lvl.smooth_unknowns, 0.0), setup.solver);
    lvl.inf_smooth = smooth.value;
    lvl.smooth = make_log(smooth);
    std::vector<double> u_smooth;
    smooth_field(smooth.x, u_smooth);

    lvl.gap = lvl.inf_smooth - lvl.inf_full;
    lvl.rel_gap = lvl.gap / std::max(std::abs(lvl.inf_full), 1e-300);
    double s = 0.0;
    for (std::size_t node = 0; node < nodes; ++node) {
      double d2 = 0.0;
      for (std::size_t a = 0; a < NN; ++a) {
        const double d = u_smooth[node * NN + a] - u_full[node * NN + a];
        d2 += d * d;
      }
      s += std::pow(std::sqrt(d2), res.p);
    }
    lvl.lp_distance = std::pow(s * grid.cell_volume(), 1.0 / res.p);
    res.levels.push_back(std::move(lvl));
  }
  return res;
}

}  // namespace dphase
