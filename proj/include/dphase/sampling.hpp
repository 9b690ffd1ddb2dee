#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dphase/fields.hpp"

namespace dphase {

/// Deterministic generator. Uniform and normal variates are derived from the raw 64-bit stream by
/// fixed formulas, so sequences are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t state_;
};

/// Additive-recurrence (Kronecker) low-discrepancy sequence in [0,1)^dim with a seeded shift.
class LatticeSequence {
 public:
  LatticeSequence(int dim, std::uint64_t seed);
  void next(std::span<double> out);

 private:
  std::vector<double> alpha_;
  std::vector<double> state_;
};

/// Maps a point of [0,1)^n onto the ball, equal-volume in the radius.
Point map_to_ball(std::span<const double> unit, const Ball& ball);

struct SamplerConfig {
  std::size_t budget = 1000;
  std::uint64_t seed = 1;
  double z_min = 1e-3;
  double z_max = 1e3;
};

/// Gradient samples: z = 0, then a deterministic mix of random directions with log-uniform
/// magnitudes in [z_min, z_max] and signed axis directions along z_n^1 and z_1^1.
std::vector<GradientMatrix> sample_gradients(int rows, int cols, const SamplerConfig& cfg);

/// Points of the closed ball: its center, the 2n extreme points center +- radius e_i, points
/// straddling every breakpoint x_1 = b that crosses the ball, and `budget` lattice points.
std::vector<Point> ball_samples(const Ball& closed_ball, std::size_t budget, std::uint64_t seed,
                                std::span<const double> breakpoints = {});

/// Offsets used for breakpoint-straddling refinement: 10^-1, ..., 10^-10.
std::span<const double> straddle_offsets();

}  // namespace dphase
