#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dphase/densities.hpp"
#include "dphase/lbfgs.hpp"

namespace dphase {

/// Piecewise-linear energy on the Kuhn triangulation of a grid: each cell is split into n! simplices
/// along coordinate paths, and f is evaluated at the simplex barycenter.
class SimplexEnergy {
 public:
  SimplexEnergy(DensitySpec f, Grid grid, int target_dim);

  const Grid& grid() const { return grid_; }
  int target_dim() const { return target_dim_; }
  std::size_t simplex_count() const { return simplex_count_; }

  /// Energy of the nodal field u (node-major, N values per node); adds dE/du into grad when non-empty.
  double evaluate(std::span<const double> u, std::span<double> grad) const;

 private:
  DensitySpec f_;
  Grid grid_;
  int target_dim_;
  std::size_t simplex_count_ = 0;
  double volume_ = 0.0;
  std::vector<std::size_t> vertices_;  // (n + 1) per simplex, along the coordinate path
  std::vector<int> axes_;              // n per simplex: axis of step j
  std::vector<double> barycenters_;    // n per simplex
};

struct LavrentievSetup {
  double lower = -1.0;           ///< the domain is [lower, upper]^n
  double upper = 1.0;
  int dim = 2;
  int target_dim = 1;
  std::vector<int> meshes{16, 32, 64};  ///< cells per axis, coarse to fine
  double eps_factor = 3.0;       ///< eps_Y = eps_factor * h
  LbfgsOptions solver{};
};

struct DescentLog {
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
  bool monotone = true;
  std::string stop_reason;
  std::vector<double> energies;
};

struct LavrentievLevel {
  int cells = 0;
  double h = 0.0;
  double eps_y = 0.0;
  double inf_full = 0.0;
  double inf_smooth = 0.0;
  double gap = 0.0;          ///< inf_smooth - inf_full
  double rel_gap = 0.0;      ///< gap / inf_full
  double lp_distance = 0.0;  ///< ||u_smooth - u_full||_{L^p}, nodal quadrature
  std::size_t full_unknowns = 0;
  std::size_t smooth_unknowns = 0;
  DescentLog full;
  DescentLog smooth;
};

struct LavrentievProbeResult {
  std::string density;
  double p = 2.0;
  std::vector<LavrentievLevel> levels;

  bool all_converged() const;
  /// inf over the subclass is never below the full infimum by more than 1e-8.
  bool subclass_consistent() const;
  bool gaps_decreasing() const;

  void write_csv(std::ostream& os, const std::vector<std::string>& metadata) const;
  std::string summary() const;
};

/// For each mesh, minimizes the discrete energy with the boundary values of g fixed, (i) over all interior
/// nodal values and (ii) over the subclass Y = { g + K v : v supported on nodes at distance >= eps_Y from
/// the boundary }, where K is the eps_Y mollification on the grid. K v vanishes on the boundary, so Y is a
/// subset of the full class. Throws if f fails a sampled convexity check.
LavrentievProbeResult lavrentiev_probe(const DensitySpec& f, const FieldFunction& boundary,
                                       const LavrentievSetup& setup);

}  // namespace dphase
