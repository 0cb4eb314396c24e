#include <cmath>
#include <limits>
#include <random>

#include "common/text.hpp"
#include "musup/error.hpp"
#include "musup/gev.hpp"

namespace musup::gev {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_gumbel(const GevParams& p) { return std::abs(p.shape) < kGumbelShapeThreshold; }

// ln t(x), or nullopt outside the support.
std::optional<double> log_t(double x, const GevParams& p) {
  const double z = (x - p.location) / p.scale;
  if (is_gumbel(p)) return -z;
  const double xz = p.shape * z;
  if (!(xz > -1.0)) return std::nullopt;
  return -std::log1p(xz) / p.shape;
}

// Uniform on the open interval (0, 1) from the top 53 bits.
double open_unit(std::mt19937_64& rng) {
  while (true) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

}  // namespace

void GevParams::validate() const {
  if (!std::isfinite(location) || !std::isfinite(scale) || !std::isfinite(shape)) {
    throw NumericError("GEV parameters must be finite");
  }
  if (!(scale > 0.0)) throw NumericError("GEV scale must be positive");
}

Support support(const GevParams& p) {
  p.validate();
  if (is_gumbel(p)) return {-kInf, kInf};
  const double bound = p.location - p.scale / p.shape;
  if (p.shape > 0.0) return {bound, kInf};
  return {-kInf, bound};
}

std::optional<double> t_value(double x, const GevParams& p) {
  p.validate();
  const auto lt = log_t(x, p);
  if (!lt) return std::nullopt;
  return std::exp(*lt);
}

double gev_log_pdf(double x, const GevParams& p) {
  p.validate();
  const auto lt = log_t(x, p);
  if (!lt) return -kInf;
  const double t = std::exp(*lt);
  const double v = -std::log(p.scale) + (p.shape + 1.0) * *lt - t;
  return std::isnan(v) ? -kInf : v;
}

double gev_pdf(double x, const GevParams& p) { return std::exp(gev_log_pdf(x, p)); }

double gev_cdf(double x, const GevParams& p) {
  p.validate();
  const auto lt = log_t(x, p);
  if (!lt) return p.shape > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(*lt));
}

double gev_quantile(double q, const GevParams& p) {
  p.validate();
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("quantile level must lie in (0, 1)");
  const double log_y = std::log(-std::log(q));
  if (is_gumbel(p)) return p.location - p.scale * log_y;
  return p.location + p.scale * std::expm1(-p.shape * log_y) / p.shape;
}

std::vector<double> gev_sample(const GevParams& p, std::size_t n, std::uint64_t seed) {
  p.validate();
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = gev_quantile(open_unit(rng), p);
  return out;
}

double gev_log_likelihood(std::span<const double> data, const GevParams& p) {
  if (data.empty()) throw DataError("log-likelihood of empty data");
  p.validate();
  double sum = 0.0;
  for (const double x : data) {
    const double lp = gev_log_pdf(x, p);
    if (lp == -kInf) return -kInf;
    sum += lp;
  }
  return sum;
}

std::string method_name(FitMethod method) {
  return method == FitMethod::full_mle ? "full_mle" : "gumbel_fixed_point";
}

std::vector<CurvePoint> curve(const GevParams& p, std::size_t points, double q_low,
                              double q_high) {
  if (points < 2) throw ConfigError("curve needs at least 2 points");
  const double lo = gev_quantile(q_low, p);
  const double hi = gev_quantile(q_high, p);
  std::vector<CurvePoint> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    out[i] = {x, gev_pdf(x, p), gev_cdf(x, p)};
  }
  return out;
}

void save_curve_csv(std::span<const CurvePoint> points, const std::filesystem::path& path) {
  std::string out = "x,pdf,cdf\n";
  for (const auto& pt : points) {
    out += detail::format_double(pt.x) + "," + detail::format_double(pt.pdf) + "," +
           detail::format_double(pt.cdf) + "\n";
  }
  detail::write_file_atomic(path, out);
}

}  // namespace musup::gev
