#include <cmath>
#include <numbers>
#include <random>

#include "musup/eeg_core.hpp"
#include "musup/error.hpp"

namespace musup {

double SurrogateConfig::gain(EventLabel label) const {
  switch (label) {
    case EventLabel::imagery:
      return imagery_gain;
    case EventLabel::movement:
      return movement_gain;
    case EventLabel::resting:
      return resting_gain;
  }
  return 1.0;
}

Epoch synthesize_surrogate(EventLabel label, double duration_s, double sample_rate,
                           std::uint64_t seed, const SurrogateConfig& config) {
  if (!(duration_s > 0.0)) throw ConfigError("surrogate duration must be positive");
  if (!(sample_rate >= 64.0)) throw ConfigError("surrogate sample rate must be at least 64 Hz");
  if (!(config.band_low_hz > 0.0 && config.band_low_hz < config.band_high_hz &&
        config.band_high_hz < sample_rate / 2.0)) {
    throw ConfigError("surrogate band must satisfy 0 < low < high < fs/2");
  }
  if (config.channels.empty()) throw ConfigError("surrogate needs at least one channel");

  const auto n_samples = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  const std::size_t n_channels = config.channels.size();

  // Frequencies on the 1/duration grid inside the band.
  std::vector<double> freqs;
  const double df = 1.0 / duration_s;
  for (auto k = static_cast<long>(std::ceil(config.band_low_hz / df));
       static_cast<double>(k) * df <= config.band_high_hz; ++k) {
    freqs.push_back(static_cast<double>(k) * df);
  }
  if (freqs.empty()) throw ConfigError("surrogate duration too short for the band");

  // E[x^2] = K * coeff_sd^2 for K sinusoids with N(0, coeff_sd^2) cosine and sine weights.
  const double coeff_sd = config.gain(label) * config.base_rms_uv /
                          std::sqrt(static_cast<double>(freqs.size()));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, coeff_sd);
  std::vector<double> samples(n_samples * n_channels, 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t m = 0; m < n_channels; ++m) {
    for (const double f : freqs) {
      const double a = normal(rng);
      const double b = normal(rng);
      const double omega = two_pi * f / sample_rate;
      for (std::size_t n = 0; n < n_samples; ++n) {
        const double phase = omega * static_cast<double>(n);
        samples[n * n_channels + m] += a * std::cos(phase) + b * std::sin(phase);
      }
    }
  }

  return Epoch{MultichannelRecord(std::move(samples), n_samples, sample_rate, config.channels),
               label, "surrogate",
               std::string(label_name(label)) + "_seed" + std::to_string(seed)};
}

}  // namespace musup
