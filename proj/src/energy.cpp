#include "dphase/energy.hpp"

namespace dphase {

double energy(const DensitySpec& f, const GradientField& du, const Ball& region) {
  const Grid& grid = du.grid();
  if (!grid.contains(region)) throw PreconditionError("energy: the ball is not inside the grid");
  Point x(static_cast<std::size_t>(grid.dim()));
  double s = 0.0;
  for (std::size_t node : grid.nodes_in_ball(region)) {
    grid.coordinates(node, x);
    s += eval_density(f, x, du.at(node));
  }
  return s * grid.cell_volume();
}

double energy(const DensitySpec& f, const SampledField& u, const Ball& region) {
  return energy(f, discrete_gradient(u), region);
}

EnergySplit scalar_truncation_energy_split(const DensitySpec& f, const SampledField& u, double k,
                                           const Ball& region) {
  if (u.target_dim() != 1) throw PreconditionError("scalar truncation split needs a scalar field (N = 1)");
  if (!(k > 0.0)) throw PreconditionError("truncation level must be positive");
  const Grid& grid = u.grid();
  if (!grid.contains(region)) throw PreconditionError("energy: the ball is not inside the grid");
  const GradientField du = discrete_gradient(u);
  const GradientMatrix zero(1, grid.dim());
  Point x(static_cast<std::size_t>(grid.dim()));
  EnergySplit out;
  for (std::size_t node : grid.nodes_in_ball(region)) {
    grid.coordinates(node, x);
    if (u.magnitude(node) <= k) {
      out.inside += eval_density(f, x, du.at(node));
    } else {
      out.outside += eval_density(f, x, zero);
    }
  }
  out.inside *= grid.cell_volume();
  out.outside *= grid.cell_volume();
  return out;
}

}  // namespace dphase
