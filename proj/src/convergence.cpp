#include "dphase/convergence.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "dphase/energy.hpp"

namespace dphase {

namespace {

Ball outer_ball(const Ball& inner, double radius) {
  if (!(radius > inner.radius)) throw PreconditionError("outer radius R must exceed the inner radius rho");
  return Ball(inner.center, radius);
}

// Flat index shifts of the stencil offsets in `grid` (x - k h).
std::vector<std::ptrdiff_t> stencil_shifts(const Grid& grid, const DiscreteKernel& kernel) {
  const int n = grid.dim();
  std::array<std::ptrdiff_t, kMaxDim> axis_stride{};
  std::ptrdiff_t st = 1;
  for (int a = n - 1; a >= 0; --a) {
    axis_stride[static_cast<std::size_t>(a)] = st;
    st *= grid.nodes(a);
  }
  std::vector<std::ptrdiff_t> out(kernel.size());
  for (std::size_t k = 0; k < kernel.size(); ++k) {
    const auto o = kernel.offset(k);
    std::ptrdiff_t d = 0;
    for (int a = 0; a < n; ++a) d -= o[static_cast<std::size_t>(a)] * axis_stride[static_cast<std::size_t>(a)];
    out[k] = d;
  }
  return out;
}

std::size_t parent_index(const Grid& child, const Grid& parent, std::size_t node) {
  const auto off = child.offset_in(parent);
  auto m = child.multi_index(node);
  for (int a = 0; a < child.dim(); ++a) m[static_cast<std::size_t>(a)] += off[static_cast<std::size_t>(a)];
  return parent.index(std::span<const int>(m.data(), static_cast<std::size_t>(child.dim())));
}

}  // namespace

GradientBoundReport gradient_bound_check(const SampledField& u, const MollifierSpec& m,
                                         const GradientBoundConfig& cfg) {
  const Ball outer = outer_ball(cfg.inner, cfg.outer_radius);
  if (!(m.eps < cfg.outer_radius - cfg.inner.radius)) {
    throw PreconditionError(fmt::format("eps = {} must be below R - rho = {}", m.eps,
                                        cfg.outer_radius - cfg.inner.radius));
  }
  if (!(cfg.p > 1.0)) throw PreconditionError("gradient bound needs p > 1");
  const int n = u.grid().dim();
  const GradientField du = discrete_gradient(u);
  GradientBoundReport rep;
  rep.eps = m.eps;
  rep.c1 = lp_norm(du, cfg.p, outer) * bump_lp_norm(n, cfg.p / (cfg.p - 1.0));
  rep.bound = rep.c1 * std::pow(m.eps, -n / cfg.p);
  const GradientField due = mollify(du, m, cfg.inner);
  for (std::size_t node : due.grid().nodes_in_ball(cfg.inner)) {
    rep.max_gradient = std::max(rep.max_gradient, due.norm_at(node));
    ++rep.nodes;
  }
  rep.passed = rep.max_gradient <= rep.bound * (1.0 + cfg.tol);
  return rep;
}

std::vector<double> convergence_eps_sequence(const ConvergenceSetup& setup, double spacing, int* dropped) {
  const double gap = setup.outer_radius - setup.inner.radius;
  const double cap = std::min(1.0, gap);
  std::vector<double> seq;
  int cut = 0;
  if (!setup.eps.empty()) {
    seq = setup.eps;
  } else {
    if (setup.steps < 1 || !(setup.ratio > 0.0 && setup.ratio < 1.0)) {
      throw PreconditionError("geometric eps sequence needs steps >= 1 and ratio in (0, 1)");
    }
    const double e0 = setup.eps0 > 0.0 ? setup.eps0 : gap / 2.0;
    double e = e0;
    for (int k = 0; k < setup.steps; ++k, e *= setup.ratio) {
      if (setup.stop_at_resolution && e < 2.0 * spacing) {
        ++cut;
        continue;
      }
      seq.push_back(e);
    }
  }
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (!(seq[k] > 0.0 && seq[k] < cap)) {
      throw PreconditionError(
          fmt::format("eps = {} violates 0 < eps < min(1, R - rho) = {}", seq[k], cap));
    }
    if (k > 0 && !(seq[k] < seq[k - 1])) throw PreconditionError("eps sequence must be strictly decreasing");
  }
  if (seq.empty()) throw PreconditionError("eps sequence is empty after the 2h resolution cut");
  if (dropped) *dropped = cut;
  return seq;
}

bool ConvergenceTrace::final_energy_ok() const {
  return !rows.empty() && rows.back().rel_energy_error < energy_tol;
}

bool ConvergenceTrace::final_grad_ok() const { return !rows.empty() && rows.back().rel_grad_error < grad_tol; }

bool ConvergenceTrace::domination_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) {
    return r.domination_violations == 0 && r.jensen_violations == 0 && r.sup_bound_ok;
  });
}

bool ConvergenceTrace::grad_error_monotone() const {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].grad_error > rows[k - 1].grad_error) return false;
  }
  return true;
}

bool ConvergenceTrace::passed() const { return final_energy_ok() && final_grad_ok() && domination_ok(); }

void ConvergenceTrace::write_csv(std::ostream& os, const std::vector<std::string>& metadata) const {
  for (const auto& m : metadata) os << "# " << m << '\n';
  os << fmt::format("# density: {}\n# target_energy: {}\n# target_energy_refined: {}\n", density, target_energy,
                    target_energy_refined);
  os << fmt::format("# grad_norm: {}\n# c1: {}\n# c3: {}\n# dropped_eps: {}\n", grad_norm, c1, c3, dropped_eps);
  os << "# columns: eps, energy F(u_eps;B), relative error vs same-grid target, relative error vs refined "
        "target, ||Du_eps-Du||_Lp(B), relative Lp error, eps^(n/p) max|Du_eps|, c3 int h_eps + K3|B|, nodes, "
        "domination violations, Jensen violations, sup bound ok\n";
  os << "eps,energy,rel_energy_error,rel_energy_error_refined,grad_error,rel_grad_error,sup_scaled,"
        "dominated_integral,nodes,domination_violations,jensen_violations,sup_bound_ok\n";
  for (const auto& r : rows) {
    os << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", r.eps, r.energy, r.rel_energy_error,
                      r.rel_energy_error_refined, r.grad_error, r.rel_grad_error, r.sup_scaled,
                      r.dominated_integral, r.nodes, r.domination_violations, r.jensen_violations,
                      r.sup_bound_ok ? 1 : 0);
  }
}

std::string ConvergenceTrace::summary() const {
  std::string out = fmt::format("density: {}\ntarget_energy: {}\n", density, target_energy);
  if (!rows.empty()) {
    const auto& r = rows.back();
    out += fmt::format("smallest_eps: {}\nfinal_rel_energy_error: {}\nfinal_rel_grad_error: {}\n", r.eps,
                       r.rel_energy_error, r.rel_grad_error);
  }
  out += fmt::format("energy_ok: {}\ngrad_ok: {}\ndomination_ok: {}\ngrad_error_monotone: {}\nverdict: {}\n",
                     final_energy_ok(), final_grad_ok(), domination_ok(), grad_error_monotone(),
                     passed() ? "pass" : "fail");
  return out;
}

namespace {

ConvergenceTrace run_convergence(const DensitySpec& f, const SampledField& us, const ConvergenceSetup& setup,
                                 const StructureConstants& c, std::optional<double> refined_target) {
  c.validate();
  const Grid& grid = us.grid();
  const int target_dim = us.target_dim();
  const Ball& inner = setup.inner;
  const Ball outer = outer_ball(inner, setup.outer_radius);
  if (!grid.contains(outer)) throw PreconditionError("the outer ball B_R must lie inside the grid");
  const int n = grid.dim();
  const double p = c.exponents.p;
  const double q = c.exponents.q;

  ConvergenceTrace tr;
  tr.density = density_name(f);
  tr.energy_tol = setup.energy_tol;
  tr.grad_tol = setup.grad_tol;
  const auto eps_seq = convergence_eps_sequence(setup, grid.spacing(), &tr.dropped_eps);

  const GradientField du = discrete_gradient(us);
  tr.target_energy = energy(f, du, inner);
  if (refined_target) tr.target_energy_refined = *refined_target;
  tr.grad_norm = lp_norm(du, p, inner);
  tr.c1 = lp_norm(du, p, outer) * bump_lp_norm(n, p / (p - 1.0));
  tr.c3 = c.K1 + c.K2 * std::pow(tr.c1, q - p);

  // h(y) = f(y, Du(y)) and the surrogate ranking of every node as a candidate y*.
  std::vector<double> h(grid.node_count());
  std::vector<double> score(grid.node_count());
  Point y(static_cast<std::size_t>(n));
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    grid.coordinates(node, y);
    h[node] = eval_density(f, y, du.at(node));
    score[node] = surrogate_score(f, y, target_dim);
  }

  const double ball_volume = [&] {
    return static_cast<double>(grid.nodes_in_ball(inner).size()) * grid.cell_volume();
  }();

  for (double eps : eps_seq) {
    const DiscreteKernel kernel(n, grid.spacing(), eps);
    const Grid out = mollified_grid(grid, kernel, inner);
    const auto due_data = convolve(grid, du.data(), du.stride(), kernel, out);
    const GradientField due(out, target_dim, due_data);
    const auto shifts = stencil_shifts(grid, kernel);

    ConvergenceRow row;
    row.eps = eps;
    double err_sum = 0.0;
    double sup = 0.0;
    double h_eps_sum = 0.0;
    Point x(static_cast<std::size_t>(n));
    for (std::size_t node : out.nodes_in_ball(inner)) {
      out.coordinates(node, x);
      const std::size_t base = parent_index(out, grid, node);
      const GradientMatrix ze = due.at(node);
      const double fe = eval_density(f, x, ze);
      row.energy += fe;
      err_sum += std::pow((ze - du.at(base)).norm(), p);
      sup = std::max(sup, ze.norm());
      ++row.nodes;

      std::size_t best = base;
      double best_score = score[base];
      double h_eps = 0.0;
      for (std::size_t k = 0; k < kernel.size(); ++k) {
        const auto idx = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(base) + shifts[k]);
        h_eps += kernel.weight(k) * h[idx];
        if (score[idx] < best_score || (score[idx] == best_score && idx < best)) {
          best = idx;
          best_score = score[idx];
        }
      }
      h_eps_sum += h_eps;
      grid.coordinates(best, y);
      const double H = eval_density(f, y, ze);
      if (violates(fe, tr.c3 * H + c.K3, 1e-9)) ++row.domination_violations;
      if (violates(H, h_eps, 1e-9)) ++row.jensen_violations;
    }
    const double cell = grid.cell_volume();
    row.energy *= cell;
    row.rel_energy_error = std::abs(row.energy - tr.target_energy) / std::max(tr.target_energy, 1e-300);
    if (refined_target) {
      row.rel_energy_error_refined =
          std::abs(row.energy - tr.target_energy_refined) / std::max(tr.target_energy_refined, 1e-300);
    }
    row.grad_error = std::pow(err_sum * cell, 1.0 / p);
    row.rel_grad_error = row.grad_error / std::max(tr.grad_norm, 1e-300);
    row.sup_scaled = std::pow(eps, n / p) * sup;
    row.sup_bound_ok = row.sup_scaled <= tr.c1 * (1.0 + 1e-2);
    row.dominated_integral = tr.c3 * h_eps_sum * cell + c.K3 * ball_volume;
    tr.rows.push_back(row);
  }
  return tr;
}

}  // namespace

ConvergenceTrace energy_convergence(const DensitySpec& f, const FieldFunction& u, int target_dim,
                                    const Grid& grid, const ConvergenceSetup& setup,
                                    const StructureConstants& c) {
  std::optional<double> refined;
  if (setup.refine > 1) {
    const Ball outer = outer_ball(setup.inner, setup.outer_radius);
    if (!grid.contains(outer)) throw PreconditionError("the outer ball B_R must lie inside the grid");
    refined = energy(f, SampledField::sample(grid.refined(setup.refine), target_dim, u), setup.inner);
  }
  return run_convergence(f, SampledField::sample(grid, target_dim, u), setup, c, refined);
}

ConvergenceTrace energy_convergence(const DensitySpec& f, const SampledField& u, const ConvergenceSetup& setup,
                                    const StructureConstants& c) {
  return run_convergence(f, u, setup, c, std::nullopt);
}

}  // namespace dphase
