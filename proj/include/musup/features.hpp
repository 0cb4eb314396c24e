#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "musup/dsp.hpp"
#include "musup/eeg_core.hpp"
#include "musup/gev.hpp"

namespace musup::features {

struct PipelineConfig {
  double band_low_hz = 7.5;
  double band_high_hz = 11.5;
  dsp::FilterSpec filter{4, 8.0, 30.0, 512.0};
  // Samples per periodogram segment; nullopt means round(fs / 2).
  std::optional<std::size_t> segment_len;
  std::vector<std::string> channels = central_motor_channels();
  // Worker threads for extract_dataset; 0 picks the hardware concurrency.
  unsigned threads = 1;

  [[nodiscard]] std::size_t segment_length_for(double sample_rate) const;
  void validate() const;
};

struct FeatureVector {
  gev::GevParams theta;
  std::optional<EventLabel> label;
  gev::GofReport gof;
  std::string epoch_id;
  double log_likelihood = 0.0;
  bool converged = false;
  std::size_t sample_count = 0;
};

// Mu-band periodogram values pooled over every segment of every configured channel.
// The filter sample rate is taken from the epoch, not from cfg.filter.
[[nodiscard]] std::vector<double> pooled_band_power(const Epoch& epoch, const PipelineConfig& cfg);

// filter -> per-segment periodograms -> band bins pooled across channels -> GEV fit + KS.
// Failures are rethrown with the epoch id prefixed to the message.
[[nodiscard]] FeatureVector extract_features(const Epoch& epoch, const PipelineConfig& cfg);

struct ExtractionFailure {
  std::string epoch_id;
  std::string message;
};

struct DatasetFeatures {
  std::vector<FeatureVector> features;
  std::vector<ExtractionFailure> failures;
};

// Runs extract_features over every epoch, in parallel when cfg.threads != 1. Output order follows
// input order; per-epoch failures are collected. Throws DataError when every epoch fails.
[[nodiscard]] DatasetFeatures extract_dataset(const std::vector<Epoch>& epochs,
                                              const PipelineConfig& cfg);

// `epoch_id,label,mu,sigma,xi,ks_D,ks_p`; the label cell is empty for unlabeled vectors.
void save_features_csv(const std::vector<FeatureVector>& features,
                       const std::filesystem::path& path);
[[nodiscard]] std::vector<FeatureVector> load_features_csv(const std::filesystem::path& path);

}  // namespace musup::features
