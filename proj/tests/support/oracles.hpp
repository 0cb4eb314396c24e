#pragma once

// Independent reference computations used by the tests. None of these call into the code
// path they check.

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <complex>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace oracle {

// GEV density written out from the textbook formula, with its own support handling.
inline double gev_density(double x, double mu, double sigma, double xi) {
  const double z = (x - mu) / sigma;
  if (xi == 0.0) {
    if (-z > 700.0) return 0.0;
    return std::exp(-z - std::exp(-z)) / sigma;
  }
  const double w = 1.0 + xi * z;
  if (w <= 0.0) return 0.0;
  const double log_t = -std::log(w) / xi;
  if (log_t > 700.0) return 0.0;
  return std::exp((xi + 1.0) * log_t - std::exp(log_t)) / sigma;
}

// Integral of the GEV density over its support by double-exponential quadrature.
inline double gev_total_mass(double mu, double sigma, double xi) {
  const auto f = [=](double x) { return gev_density(x, mu, sigma, xi); };
  boost::math::quadrature::exp_sinh<double> half_line;
  boost::math::quadrature::tanh_sinh<double> finite;
  const double tol = 1e-13;
  // Split at the mode neighbourhood so each piece is smooth and one-signed in tail behaviour.
  if (xi > 0.0) {
    const double lower = mu - sigma / xi;
    const double mid = mu + 2.0 * sigma;
    return finite.integrate(f, lower, mid, tol) +
           half_line.integrate([&](double u) { return f(mid + u); }, 0.0,
                               std::numeric_limits<double>::infinity(), tol);
  }
  if (xi < 0.0) {
    const double upper = mu - sigma / xi;
    const double mid = mu - 2.0 * sigma;
    return finite.integrate(f, mid, upper, tol) +
           half_line.integrate([&](double u) { return f(mid - u); }, 0.0,
                               std::numeric_limits<double>::infinity(), tol);
  }
  return half_line.integrate([&](double u) { return f(mu + u); }, 0.0,
                             std::numeric_limits<double>::infinity(), tol) +
         half_line.integrate([&](double u) { return f(mu - u); }, 0.0,
                             std::numeric_limits<double>::infinity(), tol);
}

// |sum_n x_n h_n e^{-2 pi i f dt n}|^2 * dt / N, evaluated by complex exponentials.
inline double direct_periodogram_value(std::span<const double> x, std::span<const double> h,
                                       double freq, double sample_rate) {
  std::complex<double> acc = 0.0;
  const double dt = 1.0 / sample_rate;
  for (std::size_t n = 0; n < x.size(); ++n) {
    acc += x[n] * h[n] *
           std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * freq * dt *
                                                  static_cast<double>(n)));
  }
  return dt / static_cast<double>(x.size()) * std::norm(acc);
}

// Mean over full segments of sum((x h)^2) / sum(h^2).
inline double windowed_segment_power(std::span<const double> x, std::size_t seg) {
  std::vector<double> h(seg);
  for (std::size_t n = 0; n < seg; ++n) {
    h[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                  static_cast<double>(seg - 1));
  }
  double energy = 0.0;
  for (const double v : h) energy += v * v;
  const std::size_t count = x.size() / seg;
  double total = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    double p = 0.0;
    for (std::size_t n = 0; n < seg; ++n) {
      const double v = x[s * seg + n] * h[n];
      p += v * v;
    }
    total += p / energy;
  }
  return total / static_cast<double>(count);
}

// Analog Butterworth magnitude at the bilinear-prewarped frequency: high-pass at `low`
// times low-pass at `high`.
inline double butterworth_bandpass_magnitude(double f, double low, double high, int order,
                                             double fs) {
  const auto warp = [fs](double hz) { return std::tan(std::numbers::pi * hz / fs); };
  const double w = warp(f);
  const double hp = 1.0 / std::sqrt(1.0 + std::pow(warp(low) / w, 2.0 * order));
  const double lp = 1.0 / std::sqrt(1.0 + std::pow(w / warp(high), 2.0 * order));
  return hp * lp;
}

// sup_x |F_n(x) - F(x)| by scanning a dense grid plus both one-sided limits at every data
// point, with F_n counted by brute force.
template <typename Cdf>
double ks_grid_sup(std::vector<double> data, Cdf cdf, std::size_t grid = 20000) {
  const double n = static_cast<double>(data.size());
  const auto ecdf_le = [&](double x) {
    return static_cast<double>(std::count_if(data.begin(), data.end(),
                                             [x](double v) { return v <= x; })) / n;
  };
  const auto ecdf_lt = [&](double x) {
    return static_cast<double>(std::count_if(data.begin(), data.end(),
                                             [x](double v) { return v < x; })) / n;
  };
  double sup = 0.0;
  for (const double x : data) {
    sup = std::max(sup, std::abs(ecdf_le(x) - cdf(x)));
    sup = std::max(sup, std::abs(ecdf_lt(x) - cdf(x)));
  }
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  const double a = *lo - 1.0;
  const double b = *hi + 1.0;
  for (std::size_t i = 0; i <= grid; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid);
    sup = std::max(sup, std::abs(ecdf_le(x) - cdf(x)));
  }
  return sup;
}

struct GridOptimum {
  double mu, sigma, xi, log_likelihood;
};

// Exhaustive search over a regular (mu, sigma, xi) grid.
inline GridOptimum grid_search_mle(std::span<const double> data, double mu_lo, double mu_hi,
                                   double s_lo, double s_hi, double xi_lo, double xi_hi,
                                   int steps) {
  GridOptimum best{0, 0, 0, -std::numeric_limits<double>::infinity()};
  for (int i = 0; i <= steps; ++i) {
    const double mu = mu_lo + (mu_hi - mu_lo) * i / steps;
    for (int j = 0; j <= steps; ++j) {
      const double s = s_lo + (s_hi - s_lo) * j / steps;
      for (int k = 0; k <= steps; ++k) {
        const double xi = xi_lo + (xi_hi - xi_lo) * k / steps;
        double ll = 0.0;
        for (const double x : data) {
          const double d = gev_density(x, mu, s, xi);
          if (d <= 0.0) {
            ll = -std::numeric_limits<double>::infinity();
            break;
          }
          ll += std::log(d);
        }
        if (ll > best.log_likelihood) best = {mu, s, xi, ll};
      }
    }
  }
  return best;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("musup_test_" + name + "_" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
