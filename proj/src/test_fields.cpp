#include "dphase/test_fields.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include <fmt/format.h>

#include "dphase/sampling.hpp"

namespace dphase {

FieldFunction affine_field(int target_dim, int dim, std::vector<double> A, std::vector<double> b) {
  if (A.size() != static_cast<std::size_t>(target_dim * dim) || b.size() != static_cast<std::size_t>(target_dim)) {
    throw PreconditionError("affine_field: A must be N x n and b of size N");
  }
  return [=](std::span<const double> x, std::span<double> out) {
    for (int a = 0; a < target_dim; ++a) {
      double s = b[static_cast<std::size_t>(a)];
      for (int i = 0; i < dim; ++i) s += A[static_cast<std::size_t>(a * dim + i)] * x[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(a)] = s;
    }
  };
}

FieldFunction kinked_field(int target_dim, double r, double delta) {
  if (!(delta > 0.0)) throw PreconditionError("kinked_field: delta must be positive");
  if (target_dim < 1 || target_dim > kMaxTargetDim) throw PreconditionError("kinked_field: unsupported N");
  return [=](std::span<const double> x, std::span<double> out) {
    const double xn = x.back();
    out[0] = std::pow(std::abs(x[0] - r), 1.0 + delta);
    if (target_dim > 1) out[1] = std::sin(x[0] + 2.0 * xn);
    if (target_dim > 2) out[2] = x[0] * xn;
  };
}

FieldFunction random_smooth_field(int target_dim, int dim, std::uint64_t seed, int modes) {
  struct Mode {
    std::array<double, kMaxDim> k{};
    double phase = 0.0;
    double amp = 0.0;
  };
  Rng rng(seed);
  std::vector<Mode> all(static_cast<std::size_t>(target_dim * modes));
  for (auto& m : all) {
    double k2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      m.k[static_cast<std::size_t>(i)] = rng.uniform(-3.0, 3.0);
      k2 += m.k[static_cast<std::size_t>(i)] * m.k[static_cast<std::size_t>(i)];
    }
    m.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    m.amp = rng.normal() / (1.0 + k2);
  }
  return [=](std::span<const double> x, std::span<double> out) {
    for (int a = 0; a < target_dim; ++a) {
      double s = 0.0;
      for (int j = 0; j < modes; ++j) {
        const Mode& m = all[static_cast<std::size_t>(a * modes + j)];
        double arg = m.phase;
        for (int i = 0; i < dim; ++i) arg += m.k[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        s += m.amp * std::sin(arg);
      }
      out[static_cast<std::size_t>(a)] = s;
    }
  };
}

FieldFunction harmonic_polynomial(int degree) {
  if (degree < 1) throw PreconditionError("harmonic_polynomial: degree must be >= 1");
  return [=](std::span<const double> x, std::span<double> out) {
    out[0] = std::pow(std::complex<double>(x[0], x[1]), degree).real();
  };
}

double harmonic_dirichlet_energy(int degree) {
  if (degree < 1 || degree > 20) throw PreconditionError("harmonic_dirichlet_energy: degree out of range");
  // |D Re(z^d)|^2 = d^2 |z|^{2(d-1)}: a polynomial of degree 2d - 2 per variable.
  // Gauss-Legendre nodes by Newton iteration on P_m.
  const int m = degree + 2;
  std::vector<double> nodes(static_cast<std::size_t>(m)), weights(nodes.size());
  for (int i = 0; i < m; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = t;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    nodes[static_cast<std::size_t>(i)] = t;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double r2 = nodes[static_cast<std::size_t>(i)] * nodes[static_cast<std::size_t>(i)] +
                        nodes[static_cast<std::size_t>(j)] * nodes[static_cast<std::size_t>(j)];
      s += weights[static_cast<std::size_t>(i)] * weights[static_cast<std::size_t>(j)] * degree * degree *
           std::pow(r2, degree - 1);
    }
  }
  return s;
}

}  // namespace dphase
