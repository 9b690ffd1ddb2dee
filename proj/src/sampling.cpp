#include "dphase/sampling.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace dphase {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::array<double, 10> kStraddle = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5,
                                              1e-6, 1e-7, 1e-8, 1e-9, 1e-10};

}  // namespace

Rng::Rng(std::uint64_t seed) : state_(seed) {}

std::uint64_t Rng::next() { return splitmix64(state_); }

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

LatticeSequence::LatticeSequence(int dim, std::uint64_t seed)
    : alpha_(static_cast<std::size_t>(dim)), state_(static_cast<std::size_t>(dim)) {
  // Generalized golden ratio: the unique positive root of x^(d+1) = x + 1.
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
  Rng rng(seed);
  for (std::size_t j = 0; j < alpha_.size(); ++j) {
    alpha_[j] = std::fmod(1.0 / std::pow(phi, static_cast<double>(j + 1)), 1.0);
    state_[j] = rng.uniform();
  }
}

void LatticeSequence::next(std::span<double> out) {
  for (std::size_t j = 0; j < state_.size(); ++j) {
    out[j] = state_[j];
    state_[j] += alpha_[j];
    if (state_[j] >= 1.0) state_[j] -= 1.0;
  }
}

Point map_to_ball(std::span<const double> unit, const Ball& ball) {
  const int n = ball.dim();
  Point x = ball.center;
  const double r = ball.radius * std::pow(unit[0], 1.0 / n);
  if (n == 1) {
    x[0] += (unit[0] * 2.0 - 1.0) * ball.radius;
  } else if (n == 2) {
    const double th = 2.0 * std::numbers::pi * unit[1];
    x[0] += r * std::cos(th);
    x[1] += r * std::sin(th);
  } else {
    const double c = 1.0 - 2.0 * unit[1];
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double ph = 2.0 * std::numbers::pi * unit[2];
    x[0] += r * c;
    x[1] += r * s * std::cos(ph);
    x[2] += r * s * std::sin(ph);
  }
  return x;
}

std::vector<GradientMatrix> sample_gradients(int rows, int cols, const SamplerConfig& cfg) {
  std::vector<GradientMatrix> out;
  out.reserve(cfg.budget);
  if (cfg.budget == 0) return out;
  out.emplace_back(rows, cols);
  Rng rng(cfg.seed ^ 0x5a5a5a5a5a5a5a5aULL);
  const double log_lo = std::log(cfg.z_min);
  const double log_hi = std::log(cfg.z_max);
  while (out.size() < cfg.budget) {
    const double mag = std::exp(rng.uniform(log_lo, log_hi));
    const std::size_t kind = out.size() % 4;
    GradientMatrix z(rows, cols);
    if (kind == 2) {
      z(0, cols - 1) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * mag;
    } else if (kind == 3) {
      z(0, 0) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * mag;
    } else {
      double s = 0.0;
      for (double& v : z.entries()) {
        v = rng.normal();
        s += v * v;
      }
      s = std::sqrt(s);
      if (s == 0.0) continue;
      z *= mag / s;
    }
    out.push_back(z);
  }
  return out;
}

std::span<const double> straddle_offsets() { return kStraddle; }

std::vector<Point> ball_samples(const Ball& closed_ball, std::size_t budget, std::uint64_t seed,
                                std::span<const double> breakpoints) {
  const int n = closed_ball.dim();
  std::vector<Point> out;
  out.push_back(closed_ball.center);
  for (int i = 0; i < n; ++i) {
    for (double s : {-1.0, 1.0}) {
      Point y = closed_ball.center;
      y[static_cast<std::size_t>(i)] += s * closed_ball.radius;
      out.push_back(std::move(y));
    }
  }
  const double c1 = closed_ball.center[0];
  for (double b : breakpoints) {
    if (std::abs(b - c1) > closed_ball.radius) continue;
    for (double d : kStraddle) {
      for (double s : {-1.0, 1.0}) {
        Point y = closed_ball.center;
        y[0] = b + s * d;
        if (distance(y, closed_ball.center) <= closed_ball.radius) out.push_back(std::move(y));
      }
    }
    Point y = closed_ball.center;
    y[0] = b;
    out.push_back(std::move(y));
  }
  LatticeSequence seq(n, seed);
  std::vector<double> u(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < budget; ++k) {
    seq.next(u);
    out.push_back(map_to_ball(u, closed_ball));
  }
  return out;
}

}  // namespace dphase
