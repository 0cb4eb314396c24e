#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace musup::gev {

struct GevParams {
  double location = 0.0;  // mu
  double scale = 1.0;     // sigma > 0
  double shape = 0.0;     // xi

  // Throws NumericError unless scale > 0 and all fields are finite.
  void validate() const;
  friend bool operator==(const GevParams&, const GevParams&) = default;
};

// Below this |shape| every evaluation uses the Gumbel (xi = 0) formulas.
inline constexpr double kGumbelShapeThreshold = 1e-6;

// Support [lower, upper]; infinite ends are +/-inf.
struct Support {
  double lower;
  double upper;
};
[[nodiscard]] Support support(const GevParams& p);

// t(x) = (1 + xi z)^(-1/xi), or exp(-z) for the Gumbel case, with z = (x - mu) / sigma.
// Returns nullopt outside the support.
[[nodiscard]] std::optional<double> t_value(double x, const GevParams& p);

[[nodiscard]] double gev_pdf(double x, const GevParams& p);
// ln pdf; -inf outside the support.
[[nodiscard]] double gev_log_pdf(double x, const GevParams& p);
[[nodiscard]] double gev_cdf(double x, const GevParams& p);
// Throws ConfigError for q outside (0, 1).
[[nodiscard]] double gev_quantile(double q, const GevParams& p);
// Inverse-CDF draws; deterministic in `seed`.
[[nodiscard]] std::vector<double> gev_sample(const GevParams& p, std::size_t n, std::uint64_t seed);
// Sum of ln pdf; -inf when any point is outside the support. Throws DataError on empty data.
[[nodiscard]] double gev_log_likelihood(std::span<const double> data, const GevParams& p);

enum class FitMethod { full_mle, gumbel_fixed_point };

struct FitResult {
  GevParams params;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  FitMethod method = FitMethod::full_mle;
};

[[nodiscard]] std::string method_name(FitMethod method);

struct MleOptions {
  // Holds the shape fixed and optimizes location and scale only.
  std::optional<double> fixed_shape;
  int max_iterations = 20000;
  double initial_shape = 0.1;
};

// Maximizes the GEV likelihood with a Nelder-Mead simplex started from moment estimates.
// Requires at least 20 distinct finite values; constant data raises DataError.
[[nodiscard]] FitResult fit_gev_mle(std::span<const double> data, const MleOptions& options = {});

// Gumbel maximum-likelihood equations solved by fixed-point iteration on the scale:
//   sigma = mean(x) - sum(x e^{-x/sigma}) / sum(e^{-x/sigma})
//   mu    = -sigma ln(mean(e^{-x/sigma}))
// Throws NumericError if 500 iterations do not reach |d sigma| < 1e-9 sigma.
[[nodiscard]] FitResult fit_gumbel_fixed_point(std::span<const double> data);

struct GofReport {
  double ks_statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  // Empirical minus model CDF at the supremum; |max_cdf_error| == ks_statistic.
  double max_cdf_error = 0.0;
};

// One-sample Kolmogorov-Smirnov test against the GEV with parameters `p`.
[[nodiscard]] GofReport ks_test(std::span<const double> data, const GevParams& p);
// P(K > lambda) for the limiting Kolmogorov distribution.
[[nodiscard]] double kolmogorov_survival(double lambda);

struct Interval {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct ParamSummary {
  Interval location;
  Interval scale;
  Interval shape;
  std::size_t count = 0;
};

// Per-parameter mean and two-sided 95% Student-t interval. Needs at least 2 fits.
[[nodiscard]] ParamSummary summarize_params(std::span<const GevParams> fits);
// "0.09 [-0.21, 0.38]" style rendering.
[[nodiscard]] std::string format_interval(const Interval& interval, int decimals = 2);

// Rows of (x, pdf, cdf) spanning the q_low..q_high quantile range, for plotting.
struct CurvePoint {
  double x;
  double pdf;
  double cdf;
};
[[nodiscard]] std::vector<CurvePoint> curve(const GevParams& p, std::size_t points = 200,
                                            double q_low = 0.001, double q_high = 0.999);
void save_curve_csv(std::span<const CurvePoint> points, const std::filesystem::path& path);

}  // namespace musup::gev
