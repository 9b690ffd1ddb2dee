#include "dphase/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <numeric>

namespace dphase {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double> x0, const LbfgsOptions& opt) {
  const std::size_t n = x0.size();
  LbfgsResult res;
  res.x = std::move(x0);
  std::vector<double> g(n), x_new(n), g_new(n), d(n);
  res.value = f(res.x, g);
  res.history.push_back(res.value);
  res.grad_norm = std::sqrt(dot(g, g));

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> mem;
  std::vector<double> alpha(static_cast<std::size_t>(opt.memory));

  while (true) {
    if (res.grad_norm <= opt.grad_tol) {
      res.converged = true;
      res.stop_reason = "gradient tolerance reached";
      break;
    }
    if (res.iterations >= opt.max_iterations) {
      res.stop_reason = "iteration cap reached";
      break;
    }
    // Two-loop recursion for d = -H g.
    d = g;
    for (std::size_t k = mem.size(); k-- > 0;) {
      alpha[k] = mem[k].rho * dot(mem[k].s, d);
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[k] * mem[k].y[i];
    }
    double gamma = 1.0;
    if (!mem.empty()) {
      gamma = dot(mem.back().s, mem.back().y) / dot(mem.back().y, mem.back().y);
    } else {
      gamma = 1.0 / std::max(res.grad_norm, 1e-300);
    }
    for (double& v : d) v *= gamma;
    for (std::size_t k = 0; k < mem.size(); ++k) {
      const double beta = mem[k].rho * dot(mem[k].y, d);
      for (std::size_t i = 0; i < n; ++i) d[i] += mem[k].s[i] * (alpha[k] - beta);
    }
    for (double& v : d) v = -v;
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      mem.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i] / std::max(res.grad_norm, 1e-300);
      slope = dot(g, d);
    }

    double t = 1.0;
    double value_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + t * d[i];
      value_new = f(x_new, g_new);
      if (std::isfinite(value_new) && value_new <= res.value + 1e-4 * t * slope && value_new <= res.value) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      res.stop_reason = "line search failed";
      break;
    }
    Pair pr{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      pr.s[i] = x_new[i] - res.x[i];
      pr.y[i] = g_new[i] - g[i];
    }
    const double sy = dot(pr.s, pr.y);
    if (sy > 1e-300) {
      pr.rho = 1.0 / sy;
      mem.push_back(std::move(pr));
      if (static_cast<int>(mem.size()) > opt.memory) mem.pop_front();
    }
    res.x.swap(x_new);
    g.swap(g_new);
    res.value = value_new;
    res.grad_norm = std::sqrt(dot(g, g));
    res.history.push_back(res.value);
    ++res.iterations;
  }
  return res;
}

}  // namespace dphase
