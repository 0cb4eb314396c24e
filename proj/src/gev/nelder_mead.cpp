#include "gev/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace musup::gev::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vertex {
  std::vector<double> x;
  double f;
};

double diameter(const std::vector<Vertex>& simplex) {
  double d = 0.0;
  for (std::size_t i = 1; i < simplex.size(); ++i) {
    for (std::size_t j = 0; j < simplex[i].x.size(); ++j) {
      d = std::max(d, std::abs(simplex[i].x[j] - simplex[0].x[j]));
    }
  }
  return d;
}

struct RunResult {
  Vertex best;
  int iterations;
  bool converged;
};

RunResult run(const std::function<double(const std::vector<double>&)>& eval,
              const std::vector<double>& start, const SimplexOptions& opt, int budget) {
  const std::size_t dim = start.size();
  std::vector<Vertex> simplex;
  simplex.push_back({start, eval(start)});
  for (std::size_t i = 0; i < dim; ++i) {
    auto x = start;
    x[i] += opt.initial_step[i];
    simplex.push_back({x, eval(x)});
  }

  const auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  const auto along = [dim](const std::vector<double>& from, const std::vector<double>& to,
                           double t) {
    std::vector<double> out(dim);
    for (std::size_t j = 0; j < dim; ++j) out[j] = from[j] + t * (to[j] - from[j]);
    return out;
  };

  int it = 0;
  for (; it < budget; ++it) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    const double f_best = simplex.front().f;
    const double f_worst = simplex.back().f;
    if (std::isfinite(f_worst) &&
        f_worst - f_best <= opt.f_tol * (1.0 + std::abs(f_best)) && diameter(simplex) <= opt.x_tol) {
      return {simplex.front(), it, true};
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i].x[j];
    }
    for (auto& c : centroid) c /= static_cast<double>(dim);

    auto& worst = simplex.back();
    const auto xr = along(centroid, worst.x, -1.0);
    const double fr = eval(xr);
    if (fr < simplex.front().f) {
      const auto xe = along(centroid, worst.x, -2.0);
      const double fe = eval(xe);
      worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < simplex[dim - 1].f) {
      worst = {xr, fr};
      continue;
    }
    // Contraction, outside if the reflection beat the worst vertex, inside otherwise.
    const bool outside = fr < worst.f;
    const auto xc = along(centroid, worst.x, outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : worst.f)) {
      worst = {xc, fc};
      continue;
    }
    for (std::size_t i = 1; i <= dim; ++i) {
      simplex[i].x = along(simplex[0].x, simplex[i].x, 0.5);
      simplex[i].f = eval(simplex[i].x);
    }
  }
  std::stable_sort(simplex.begin(), simplex.end(), by_value);
  return {simplex.front(), it, false};
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start, const SimplexOptions& options) {
  const auto eval = [&f](const std::vector<double>& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };

  int used = 0;
  auto result = run(eval, start, options, options.max_iterations);
  used += result.iterations;
  bool converged = result.converged;
  for (int r = 0; r < options.max_restarts && converged; ++r) {
    const int budget = options.max_iterations - used;
    if (budget <= 0) {
      converged = false;
      break;
    }
    auto again = run(eval, result.best.x, options, budget);
    used += again.iterations;
    const double gain = result.best.f - again.best.f;
    const bool improved = again.best.f < result.best.f;
    if (improved) result.best = again.best;
    converged = again.converged;
    if (!improved || gain <= options.f_tol * (1.0 + std::abs(result.best.f))) break;
  }
  return {result.best.x, result.best.f, used, converged};
}

}  // namespace musup::gev::detail
