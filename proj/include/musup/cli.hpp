#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "musup/classify.hpp"
#include "musup/eeg_core.hpp"
#include "musup/features.hpp"

namespace musup::cli {

inline constexpr const char* kVersion = "0.1.0";

// ---- flag value parsers (ConfigError on malformed text) ----
// "7.5:11.5"
[[nodiscard]] std::pair<double, double> parse_band(std::string_view text);
// "8:30:4" -> low, high, order
[[nodiscard]] dsp::FilterSpec parse_filter(std::string_view text);
// "auto" or a sample count
[[nodiscard]] std::optional<std::size_t> parse_segment(std::string_view text);
// "json,csv"
[[nodiscard]] std::vector<std::string> parse_formats(std::string_view text);
// "3:2:1" -> imagery, movement, resting gains
void parse_gains(std::string_view text, SurrogateConfig& config);

// ---- manifest: `path,label,subject_id,epoch_id`, paths relative to the manifest ----
struct ManifestEntry {
  std::filesystem::path path;
  std::optional<EventLabel> label;
  std::string subject_id;
  std::string epoch_id;
};

[[nodiscard]] std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);
void save_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path);
// Loads every listed file; manifest labels and ids override what the files carry.
[[nodiscard]] std::vector<Epoch> load_manifest_epochs(const std::filesystem::path& manifest,
                                                      std::optional<double> sample_rate_override);

struct SynthOptions {
  int per_class = 10;
  double duration_s = 2.0;
  double sample_rate = 512.0;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  SurrogateConfig surrogate;
};

// Writes <out>/epochs/<epoch_id>.eegb for every class and <out>/manifest.csv. Returns the
// manifest path.
std::filesystem::path cmd_synth(const SynthOptions& options);

struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path out;
  features::PipelineConfig pipeline;
  classify::CvConfig cv;
  std::uint64_t seed = 0;
  std::vector<std::string> formats{"json", "csv"};
  std::optional<double> sample_rate_override;
  // Provenance timestamp; the current UTC time when unset.
  std::optional<std::string> timestamp;

  [[nodiscard]] bool wants(std::string_view format) const;
};

struct CommandResult {
  int exit_code = 0;
  nlohmann::json report;
  // Human-readable table for stdout, empty when classification did not run.
  std::string table;
};

// Stages 1-2: features, per-class parameter summaries, goodness of fit, curve CSVs.
CommandResult cmd_fit(const RunConfig& config);
// Stage 3 over a feature CSV.
CommandResult cmd_classify(const RunConfig& config);
// All three stages over a manifest; classification is skipped when labels are missing.
CommandResult cmd_pipeline(const RunConfig& config);

// Serializers shared by the commands.
[[nodiscard]] nlohmann::json to_json(const features::DatasetFeatures& dataset);
[[nodiscard]] nlohmann::json to_json(const gev::ParamSummary& summary);
[[nodiscard]] nlohmann::json to_json(const classify::CvReport& report,
                                     const classify::CvConfig& config);

}  // namespace musup::cli
