#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "musup/error.hpp"
#include "musup/gev.hpp"

namespace musup::gev {
namespace {

Interval t_interval(const std::vector<double>& values, double t_crit) {
  const double n = static_cast<double>(values.size());
  // Offsets from the first value make identical inputs reproduce that value exactly.
  const double ref = values.front();
  double offset_sum = 0.0;
  for (const double v : values) offset_sum += v - ref;
  const double mean = ref + offset_sum / n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  const double half = t_crit * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return {mean, mean - half, mean + half};
}

}  // namespace

ParamSummary summarize_params(std::span<const GevParams> fits) {
  if (fits.size() < 2) throw DataError("summarizing parameters needs at least 2 fits");
  const boost::math::students_t dist(static_cast<double>(fits.size() - 1));
  const double t_crit = boost::math::quantile(dist, 0.975);

  std::vector<double> mu, sigma, xi;
  for (const auto& f : fits) {
    mu.push_back(f.location);
    sigma.push_back(f.scale);
    xi.push_back(f.shape);
  }
  return {t_interval(mu, t_crit), t_interval(sigma, t_crit), t_interval(xi, t_crit), fits.size()};
}

std::string format_interval(const Interval& interval, int decimals) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(decimals) << interval.mean << " [" << interval.ci_low
     << ", " << interval.ci_high << "]";
  return ss.str();
}

}  // namespace musup::gev
