#include <cmath>
#include <numbers>

#include "common/text.hpp"
#include "musup/dsp.hpp"
#include "musup/error.hpp"

namespace musup::dsp {

std::vector<double> hamming_window(std::size_t length) {
  if (length < 2) throw ConfigError("Hamming window length must be >= 2");
  const double denom = static_cast<double>(length - 1);
  std::vector<double> h(length);
  for (std::size_t n = 0; n < length; ++n) {
    h[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom);
  }
  // Exact mirror so the window is a palindrome bit for bit.
  for (std::size_t n = 0; n < length / 2; ++n) h[length - 1 - n] = h[n];
  return h;
}

std::size_t default_segment_length(double sample_rate) {
  return static_cast<std::size_t>(std::llround(sample_rate / 2.0));
}

std::vector<Spectrum> periodogram_segments(std::span<const double> signal, double sample_rate,
                                           std::size_t segment_len) {
  if (segment_len < 8) throw ConfigError("periodogram segment length must be >= 8");
  if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
  if (signal.size() < segment_len) {
    throw DataError("signal of " + std::to_string(signal.size()) +
                    " samples is shorter than one segment of " + std::to_string(segment_len));
  }

  const std::size_t len = segment_len;
  const std::size_t n_bins = len / 2 + 1;
  const auto window = hamming_window(len);
  double window_energy = 0.0;
  for (const double h : window) window_energy += h * h;

  // Twiddles indexed by (k * n) mod len.
  std::vector<double> cos_table(len);
  std::vector<double> sin_table(len);
  for (std::size_t i = 0; i < len; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(len);
    cos_table[i] = std::cos(angle);
    sin_table[i] = std::sin(angle);
  }

  std::vector<double> freqs(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    freqs[k] = static_cast<double>(k) * sample_rate / static_cast<double>(len);
  }

  const double scale = (1.0 / sample_rate) / window_energy;
  const std::size_t n_segments = signal.size() / len;
  std::vector<Spectrum> out;
  out.reserve(n_segments);
  std::vector<double> tapered(len);
  for (std::size_t seg = 0; seg < n_segments; ++seg) {
    const auto* x = signal.data() + seg * len;
    for (std::size_t n = 0; n < len; ++n) tapered[n] = x[n] * window[n];

    Spectrum s;
    s.freqs_hz = freqs;
    s.power.resize(n_bins);
    s.segment_count = 1;
    for (std::size_t k = 0; k < n_bins; ++k) {
      double re = 0.0;
      double im = 0.0;
      std::size_t idx = 0;
      for (std::size_t n = 0; n < len; ++n) {
        re += tapered[n] * cos_table[idx];
        im -= tapered[n] * sin_table[idx];
        idx += k;
        if (idx >= len) idx -= len;
      }
      const bool unpaired = k == 0 || (len % 2 == 0 && k == len / 2);
      s.power[k] = (unpaired ? 1.0 : 2.0) * scale * (re * re + im * im);
    }
    out.push_back(std::move(s));
  }
  return out;
}

Spectrum periodogram(std::span<const double> signal, double sample_rate, std::size_t segment_len) {
  const auto segments = periodogram_segments(signal, sample_rate, segment_len);
  Spectrum avg;
  avg.freqs_hz = segments.front().freqs_hz;
  avg.power.assign(avg.freqs_hz.size(), 0.0);
  for (const auto& s : segments) {
    for (std::size_t k = 0; k < s.power.size(); ++k) avg.power[k] += s.power[k];
  }
  for (auto& p : avg.power) p /= static_cast<double>(segments.size());
  avg.segment_count = segments.size();
  return avg;
}

Spectrum band_extract(const Spectrum& spectrum, double low_hz, double high_hz) {
  if (!(low_hz < high_hz)) throw ConfigError("band requires low < high");
  const double tol_low = 1e-9 * std::max(1.0, std::abs(low_hz));
  const double tol_high = 1e-9 * std::max(1.0, std::abs(high_hz));
  Spectrum out;
  out.segment_count = spectrum.segment_count;
  out.window_name = spectrum.window_name;
  for (std::size_t k = 0; k < spectrum.freqs_hz.size(); ++k) {
    const double f = spectrum.freqs_hz[k];
    if (f >= low_hz - tol_low && f <= high_hz + tol_high) {
      out.freqs_hz.push_back(f);
      out.power.push_back(spectrum.power[k]);
    }
  }
  if (out.freqs_hz.empty()) {
    throw DataError("band [" + detail::format_double(low_hz) + ", " +
                    detail::format_double(high_hz) + "] Hz contains no spectrum bins");
  }
  return out;
}

void save_spectrum_csv(const Spectrum& spectrum, const std::filesystem::path& path) {
  std::string out = "freq_hz,power\n";
  for (std::size_t k = 0; k < spectrum.freqs_hz.size(); ++k) {
    out += detail::format_double(spectrum.freqs_hz[k]) + "," +
           detail::format_double(spectrum.power[k]) + "\n";
  }
  detail::write_file_atomic(path, out);
}

}  // namespace musup::dsp
