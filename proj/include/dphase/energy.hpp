#pragma once

#include "dphase/densities.hpp"
#include "dphase/fields.hpp"

namespace dphase {

/// Midpoint quadrature of f(x, Du(x)) over the nodes inside the open ball (dual cells of volume h^n).
double energy(const DensitySpec& f, const GradientField& du, const Ball& region);
/// Same, with Du the discrete gradient of u.
double energy(const DensitySpec& f, const SampledField& u, const Ball& region);

struct EnergySplit {
  double inside = 0.0;   ///< quadrature of f(x, Du) over {|u| <= k}
  double outside = 0.0;  ///< quadrature of f(x, 0) over {|u| > k}
};

/// The two pieces of the energy of the truncation u_k of a scalar field. Their sum equals the energy of
/// the chain-rule gradient of u_k (Du on {|u| <= k}, 0 elsewhere). Throws when u has more than one component.
EnergySplit scalar_truncation_energy_split(const DensitySpec& f, const SampledField& u, double k,
                                           const Ball& region);

}  // namespace dphase
