#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dphase/conditions.hpp"
#include "dphase/mollifier.hpp"

namespace dphase {

struct GradientBoundConfig {
  double p = 2.0;
  Ball inner;               ///< B_rho, where the bound is checked
  double outer_radius = 1;  ///< R, with the same center; the L^p norm of Du is taken over B_R
  double tol = 1e-2;
};

struct GradientBoundReport {
  double eps = 0.0;
  double c1 = 0.0;          ///< ||Du||_{L^p(B_R)} ||phi||_{L^{p'}(B(0,1))}
  double bound = 0.0;       ///< c1 eps^{-n/p}
  double max_gradient = 0.0;
  std::size_t nodes = 0;
  bool passed = false;
};

/// max |Du_eps| over the nodes of B_rho against c1 eps^{-n/p} (1 + tol). Requires eps < R - rho.
GradientBoundReport gradient_bound_check(const SampledField& u, const MollifierSpec& m,
                                         const GradientBoundConfig& cfg);

struct ConvergenceSetup {
  Ball inner;                   ///< B = B_rho
  double outer_radius = 1.0;    ///< R
  std::vector<double> eps;      ///< explicit sequence; empty means geometric from eps0
  double eps0 = 0.0;            ///< 0 means (R - rho) / 2
  double ratio = 0.5;
  int steps = 7;
  bool stop_at_resolution = true;  ///< drop geometric terms below 2h instead of failing
  double energy_tol = 1e-2;
  double grad_tol = 1e-2;
  int refine = 2;                  ///< refinement factor of the reference energy (1 disables it)
};

/// The sequence actually used; throws when a term is not in (0, min(1, R - rho)) or the list is not
/// strictly decreasing. `dropped` receives the number of geometric terms cut at the 2h resolution limit.
std::vector<double> convergence_eps_sequence(const ConvergenceSetup& setup, double spacing, int* dropped = nullptr);

struct ConvergenceRow {
  double eps = 0.0;
  double energy = 0.0;
  double rel_energy_error = 0.0;          ///< against the same-grid target
  double rel_energy_error_refined = 0.0;  ///< against the refined-grid target (0 when disabled)
  double grad_error = 0.0;                ///< ||Du_eps - Du||_{L^p(B)}
  double rel_grad_error = 0.0;
  double sup_scaled = 0.0;                ///< eps^{n/p} max_B |Du_eps|, to compare with c1
  double dominated_integral = 0.0;        ///< c3 int_B h_eps + K3 |B|
  std::size_t nodes = 0;
  std::size_t domination_violations = 0;  ///< nodes with f(x, Du_eps) > c3 f(y*, Du_eps) + K3
  std::size_t jensen_violations = 0;      ///< nodes with f(y*, Du_eps) > h_eps
  bool sup_bound_ok = true;
};

struct ConvergenceTrace {
  std::string density;
  double target_energy = 0.0;
  double target_energy_refined = 0.0;
  double grad_norm = 0.0;  ///< ||Du||_{L^p(B)}
  double c1 = 0.0;
  double c3 = 0.0;
  double energy_tol = 0.0;
  double grad_tol = 0.0;
  int dropped_eps = 0;
  std::vector<ConvergenceRow> rows;

  bool final_energy_ok() const;
  bool final_grad_ok() const;
  bool domination_ok() const;
  bool grad_error_monotone() const;
  bool passed() const;

  /// '#' metadata lines, a '#' column description, the header row, and one row per eps.
  void write_csv(std::ostream& os, const std::vector<std::string>& metadata) const;
  std::string summary() const;
};

/// Mollifies u at each eps of the sequence and records the energy over B = B_rho, the L^p distance of
/// the gradients, the sup bound, and the node-wise domination f(x, Du_eps) <= c3 f(y*, Du_eps) + K3 <=
/// c3 h_eps + K3 with y* the surrogate minimum point among the stencil nodes around x.
/// The refined-grid reference is computed from u when setup.refine > 1.
ConvergenceTrace energy_convergence(const DensitySpec& f, const FieldFunction& u, int target_dim,
                                    const Grid& grid, const ConvergenceSetup& setup,
                                    const StructureConstants& c);
/// Same for a sampled field; no refined reference is available, so setup.refine is ignored.
ConvergenceTrace energy_convergence(const DensitySpec& f, const SampledField& u, const ConvergenceSetup& setup,
                                    const StructureConstants& c);

}  // namespace dphase
