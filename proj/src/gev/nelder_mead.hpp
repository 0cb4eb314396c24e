#pragma once

#include <functional>
#include <vector>

namespace musup::gev::detail {

struct SimplexOptions {
  std::vector<double> initial_step;
  int max_iterations = 20000;
  // Converged when the vertex values agree to f_tol * (1 + |f_best|) and the simplex
  // diameter is below x_tol.
  double f_tol = 1e-13;
  double x_tol = 1e-9;
  int max_restarts = 8;
};

struct SimplexResult {
  std::vector<double> x;
  double value;
  int iterations;
  bool converged;
};

// Minimizes `f` with the Nelder-Mead simplex (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2). Non-finite values are treated as +inf. After each convergence the simplex is
// rebuilt around the best vertex and the search restarted until it stops improving.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start, const SimplexOptions& options);

}  // namespace musup::gev::detail
