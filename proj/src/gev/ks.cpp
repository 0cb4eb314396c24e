#include <algorithm>
#include <cmath>
#include <numbers>

#include "musup/error.hpp"
#include "musup/gev.hpp"

namespace musup::gev {

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr double kTermTol = 1e-12;
  double p = 0.0;
  if (lambda < 1.18) {
    // Jacobi-theta form of the CDF converges fast for small lambda.
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k < 1000; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * c);
      sum += term;
      if (term < kTermTol) break;
    }
    p = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
  } else {
    double sign = 1.0;
    for (int k = 1; k < 1000; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      p += sign * 2.0 * term;
      if (term < kTermTol) break;
      sign = -sign;
    }
  }
  return std::clamp(p, 0.0, 1.0);
}

GofReport ks_test(std::span<const double> data, const GevParams& p) {
  if (data.empty()) throw DataError("KS test on empty data");
  p.validate();
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  GofReport report;
  report.n = sorted.size();
  double sup = -1.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = gev_cdf(sorted[i], p);
    const double above = static_cast<double>(i + 1) / n - f;  // empirical after the step
    const double below = f - static_cast<double>(i) / n;      // empirical before the step
    if (above > sup) {
      sup = above;
      report.max_cdf_error = above;
    }
    if (below > sup) {
      sup = below;
      report.max_cdf_error = -below;
    }
  }
  report.ks_statistic = std::clamp(sup, 0.0, 1.0);
  report.p_value = kolmogorov_survival(std::sqrt(n) * report.ks_statistic);
  return report;
}

}  // namespace musup::gev
