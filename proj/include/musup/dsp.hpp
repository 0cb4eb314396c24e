#pragma once

#include <array>
#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "musup/eeg_core.hpp"

namespace musup::dsp {

struct FilterSpec {
  int order = 4;
  double low_cut_hz = 8.0;
  double high_cut_hz = 30.0;
  double sample_rate = 512.0;

  // Throws ConfigError unless 0 < low < high < fs/2 and order >= 1.
  void validate() const;
};

// y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  [[nodiscard]] std::complex<double> response(std::complex<double> z) const;
  // Largest modulus among the section's poles.
  [[nodiscard]] double max_pole_modulus() const;
};

struct BiquadCascade {
  std::vector<Biquad> sections;
  double gain = 1.0;

  // H(e^{j 2 pi f / fs}).
  [[nodiscard]] std::complex<double> response(double freq_hz, double sample_rate) const;
  [[nodiscard]] double magnitude(double freq_hz, double sample_rate) const {
    return std::abs(response(freq_hz, sample_rate));
  }
  [[nodiscard]] double max_pole_modulus() const;
};

// Butterworth high-pass at low_cut followed by Butterworth low-pass at high_cut, both of the
// given order, discretized by the prewarped bilinear transform and factored into sections.
[[nodiscard]] BiquadCascade design_butterworth_bandpass(const FilterSpec& spec);

// Direct form II transposed, zero initial state.
[[nodiscard]] std::vector<double> filter_signal(const BiquadCascade& cascade,
                                                std::span<const double> signal);
// Filters each channel independently; dimensions and rate are unchanged.
[[nodiscard]] MultichannelRecord apply_filter(const BiquadCascade& cascade,
                                              const MultichannelRecord& record);

// Symmetric window h(n) = 0.54 - 0.46 cos(2 pi n / (length - 1)).
[[nodiscard]] std::vector<double> hamming_window(std::size_t length);

struct Spectrum {
  std::vector<double> freqs_hz;
  std::vector<double> power;
  std::size_t segment_count = 0;
  std::string window_name = "hamming";
};

// One-sided Hamming-windowed periodogram of every full, non-overlapping segment of
// `segment_len` samples. Each spectrum is scaled by dt / sum(h^2) and one-sided bins (except DC
// and Nyquist) are doubled, so sum(P) * df equals sum((x h)^2) / sum(h^2) for that segment.
[[nodiscard]] std::vector<Spectrum> periodogram_segments(std::span<const double> signal,
                                                         double sample_rate,
                                                         std::size_t segment_len);
// Average of periodogram_segments; trailing samples beyond the last full segment are dropped.
[[nodiscard]] Spectrum periodogram(std::span<const double> signal, double sample_rate,
                                   std::size_t segment_len);

// Default segment length: half a second of samples.
[[nodiscard]] std::size_t default_segment_length(double sample_rate);

// Bins with low <= f <= high (inclusive, with a 1e-9 relative tolerance on the endpoints).
[[nodiscard]] Spectrum band_extract(const Spectrum& spectrum, double low_hz, double high_hz);

void save_spectrum_csv(const Spectrum& spectrum, const std::filesystem::path& path);

}  // namespace musup::dsp
