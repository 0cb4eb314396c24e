#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "gev/nelder_mead.hpp"
#include "musup/error.hpp"
#include "musup/gev.hpp"

namespace musup::gev {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEulerGamma = 0.5772156649015329;
constexpr std::size_t kMinDistinct = 20;

struct Moments {
  double mean;
  double sd;
};

// Shared precondition check for both estimators.
Moments check_fit_input(std::span<const double> data) {
  if (data.empty()) throw DataError("cannot fit empty data");
  for (const double x : data) {
    if (!std::isfinite(x)) throw DataError("cannot fit non-finite data");
  }
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  if (*lo == *hi) throw DataError("zero-variance data: all values equal");

  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = static_cast<std::size_t>(
      std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  if (distinct < kMinDistinct) {
    throw DataError("too few points: " + std::to_string(distinct) + " distinct values, need " +
                    std::to_string(kMinDistinct));
  }

  const double n = static_cast<double>(data.size());
  const double mean = std::accumulate(data.begin(), data.end(), 0.0) / n;
  double ss = 0.0;
  for (const double x : data) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw DataError("zero-variance data");
  return {mean, sd};
}

// Log-likelihood without parameter validation; -inf for any invalid combination.
double raw_log_likelihood(std::span<const double> z, double mu, double sigma, double xi) {
  if (!(sigma > 0.0) || !std::isfinite(mu) || !std::isfinite(sigma) || !std::isfinite(xi)) {
    return -kInf;
  }
  const GevParams p{mu, sigma, xi};
  double sum = 0.0;
  for (const double x : z) {
    const double lp = gev_log_pdf(x, p);
    if (lp == -kInf) return -kInf;
    sum += lp;
  }
  return sum;
}

}  // namespace

FitResult fit_gev_mle(std::span<const double> data, const MleOptions& options) {
  const auto [mean, sd] = check_fit_input(data);

  // The search runs on standardized data, which makes the fit location-scale equivariant.
  std::vector<double> z(data.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = (data[i] - mean) / sd;

  const bool fixed = options.fixed_shape.has_value();
  const double sigma0 = std::sqrt(6.0) / std::numbers::pi;
  const double mu0 = -kEulerGamma * sigma0;
  double xi0 = fixed ? *options.fixed_shape : options.initial_shape;
  double log_sigma0 = std::log(sigma0);
  if (!fixed && !std::isfinite(raw_log_likelihood(z, mu0, sigma0, xi0))) xi0 = 0.0;
  // Widen the starting scale until every point is inside the support.
  for (int i = 0; i < 60 && !std::isfinite(raw_log_likelihood(z, mu0, std::exp(log_sigma0), xi0));
       ++i) {
    log_sigma0 += 0.5;
  }

  const auto objective = [&](const std::vector<double>& v) {
    const double xi = fixed ? *options.fixed_shape : v[2];
    if (xi <= -1.0) return kInf;
    return -raw_log_likelihood(z, v[0], std::exp(v[1]), xi);
  };

  detail::SimplexOptions simplex;
  simplex.max_iterations = options.max_iterations;
  std::vector<double> start{mu0, log_sigma0};
  simplex.initial_step = {0.1, 0.1};
  if (!fixed) {
    start.push_back(xi0);
    simplex.initial_step.push_back(0.05);
  }
  const auto best = detail::nelder_mead(objective, start, simplex);
  if (!std::isfinite(best.value)) throw NumericError("GEV likelihood is not finite anywhere searched");

  FitResult result;
  result.params = {mean + sd * best.x[0], sd * std::exp(best.x[1]),
                   fixed ? *options.fixed_shape : best.x[2]};
  result.log_likelihood = gev_log_likelihood(data, result.params);
  result.converged = best.converged && std::isfinite(result.log_likelihood);
  result.iterations = best.iterations;
  result.method = FitMethod::full_mle;
  return result;
}

FitResult fit_gumbel_fixed_point(std::span<const double> data) {
  const auto [mean, sd] = check_fit_input(data);
  const double n = static_cast<double>(data.size());
  const double x_min = *std::min_element(data.begin(), data.end());

  // Offsets from the minimum keep every exponential weight in (0, 1].
  std::vector<double> d(data.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = data[i] - x_min;
  const double mean_offset = mean - x_min;

  const auto weight_sum = [&](double sigma) {
    double sw = 0.0;
    double sdw = 0.0;
    for (const double di : d) {
      const double w = std::exp(-di / sigma);
      sw += w;
      sdw += di * w;
    }
    return std::pair{sw, sdw};
  };

  constexpr int kMaxIterations = 500;
  double sigma = sd * std::sqrt(6.0) / std::numbers::pi;
  int it = 0;
  bool converged = false;
  while (it < kMaxIterations) {
    ++it;
    const auto [sw, sdw] = weight_sum(sigma);
    const double next = mean_offset - sdw / sw;
    if (!(next > 0.0) || !std::isfinite(next)) {
      throw NumericError("Gumbel fixed-point iteration left the positive scale range");
    }
    const double step = std::abs(next - sigma);
    sigma = next;
    if (step < 1e-9 * sigma) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NumericError("Gumbel fixed-point iteration did not converge in " +
                       std::to_string(kMaxIterations) + " iterations");
  }
  const double mu = x_min - sigma * std::log(weight_sum(sigma).first / n);

  FitResult result;
  result.params = {mu, sigma, 0.0};
  result.log_likelihood = gev_log_likelihood(data, result.params);
  result.converged = true;
  result.iterations = it;
  result.method = FitMethod::gumbel_fixed_point;
  return result;
}

}  // namespace musup::gev
