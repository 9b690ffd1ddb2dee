#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dphase {

/// Objective writing its gradient into the second argument and returning its value.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  int max_iterations = 20000;
  double grad_tol = 1e-6;  ///< stop when the Euclidean gradient norm drops to this value
  int memory = 12;
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<double> history;  ///< objective value after every accepted step, starting with x0
};

/// Limited-memory BFGS with Armijo backtracking; every accepted step decreases the objective.
LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double> x0, const LbfgsOptions& opt);

}  // namespace dphase
