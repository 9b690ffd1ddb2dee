#pragma once

#include <cstdint>
#include <vector>

#include "dphase/fields.hpp"

namespace dphase {

/// u(x) = A x + b with A of shape N x n (row-major) and b of size N.
FieldFunction affine_field(int target_dim, int dim, std::vector<double> A, std::vector<double> b);

/// u^1 = |x_1 - r|^{1 + delta}; the other components are smooth: u^2 = sin(x_1 + 2 x_n), u^3 = x_1 x_n.
FieldFunction kinked_field(int target_dim, double r, double delta);

/// Sum of `modes` sine modes per component with seeded frequencies in [-3, 3]^n, phases, and amplitudes
/// decaying like 1/|k|^2.
FieldFunction random_smooth_field(int target_dim, int dim, std::uint64_t seed, int modes = 4);

/// Scalar Re((x_1 + i x_2)^d), harmonic in the plane.
FieldFunction harmonic_polynomial(int degree);

/// Dirichlet energy int |D Re(z^d)|^2 over [-1, 1]^2 by tensor Gauss-Legendre quadrature (exact for
/// polynomial integrands of the degrees involved).
double harmonic_dirichlet_energy(int degree);

}  // namespace dphase
