#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace musup {

// Class codes are fixed: imagery 1, movement 0, resting -1.
enum class EventLabel : int {
  imagery = 1,
  movement = 0,
  resting = -1,
};

// Canonical label order, also used for tie-breaking in the classifier.
inline constexpr std::array<EventLabel, 3> kEventLabels{EventLabel::imagery, EventLabel::movement,
                                                        EventLabel::resting};

[[nodiscard]] constexpr int label_code(EventLabel label) { return static_cast<int>(label); }
[[nodiscard]] std::string_view label_name(EventLabel label);
[[nodiscard]] std::optional<EventLabel> label_from_code(int code);
// Accepts an integer code ("1", "0", "-1") or a name ("imagery", ...). Empty text yields nullopt.
[[nodiscard]] std::optional<EventLabel> parse_label(std::string_view text);
// Index of `label` within kEventLabels.
[[nodiscard]] std::size_t label_index(EventLabel label);

// C5, C3, C1, Cz, C2, C4, C6 of the 10-10 system.
[[nodiscard]] const std::vector<std::string>& central_motor_channels();

// N x M matrix of amplitudes in microvolts, stored row-major (one row per time instant).
// Immutable once constructed; the constructor enforces every invariant.
class MultichannelRecord {
 public:
  MultichannelRecord(std::vector<double> samples, std::size_t n_samples, double sample_rate,
                     std::vector<std::string> channel_names);

  [[nodiscard]] std::size_t n_samples() const noexcept { return n_samples_; }
  [[nodiscard]] std::size_t n_channels() const noexcept { return channel_names_.size(); }
  [[nodiscard]] double sample_rate() const noexcept { return sample_rate_; }
  [[nodiscard]] double sample_interval() const noexcept { return 1.0 / sample_rate_; }
  [[nodiscard]] const std::vector<std::string>& channel_names() const noexcept {
    return channel_names_;
  }
  [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }

  [[nodiscard]] double at(std::size_t sample, std::size_t channel) const {
    return samples_[sample * n_channels() + channel];
  }
  [[nodiscard]] std::vector<double> channel(std::size_t index) const;
  [[nodiscard]] std::optional<std::size_t> channel_index(std::string_view name) const;

  friend bool operator==(const MultichannelRecord&, const MultichannelRecord&) = default;

 private:
  std::vector<double> samples_;
  std::size_t n_samples_;
  double sample_rate_;
  std::vector<std::string> channel_names_;
};

struct Epoch {
  MultichannelRecord record;
  std::optional<EventLabel> label;
  std::string subject_id;
  std::string epoch_id;
};

// CSV: optional leading `# fs=<Hz>` line, header `time,<ch1>,...,<chM>`, one row per sample.
// `sample_rate_override` takes precedence over the in-file rate and is required when the file
// carries none. The epoch id is the file stem.
[[nodiscard]] std::vector<Epoch> load_csv(const std::filesystem::path& path,
                                          std::optional<double> sample_rate_override = {});
// Values are written in shortest round-trip form, so load_csv(save_csv(r)) reproduces r exactly.
void save_csv(const MultichannelRecord& record, const std::filesystem::path& path);

// "EEGB" little-endian container; see README for the byte layout.
[[nodiscard]] std::vector<Epoch> load_binary(const std::filesystem::path& path);
void save_binary(const MultichannelRecord& record, const std::filesystem::path& path);

// Dispatches on extension: `.eegb` is binary, anything else is CSV.
[[nodiscard]] std::vector<Epoch> load_epochs(const std::filesystem::path& path,
                                             std::optional<double> sample_rate_override = {});

// Restricts and reorders columns to `names`. Unknown names raise DataError naming the channel.
[[nodiscard]] MultichannelRecord select_channels(const MultichannelRecord& record,
                                                 std::span<const std::string> names);

struct SurrogateConfig {
  double imagery_gain = 3.0;
  double movement_gain = 2.0;
  double resting_gain = 1.0;
  // RMS of a gain-1 channel.
  double base_rms_uv = 10.0;
  double band_low_hz = 8.0;
  double band_high_hz = 30.0;
  std::vector<std::string> channels = central_motor_channels();

  [[nodiscard]] double gain(EventLabel label) const;
};

// Band-limited Gaussian noise built from random-coefficient sinusoids on the 1/duration grid
// inside [band_low_hz, band_high_hz]. The noise realization depends only on (duration, rate,
// seed); the class only selects the gain, so equal seeds give proportional epochs.
[[nodiscard]] Epoch synthesize_surrogate(EventLabel label, double duration_s, double sample_rate,
                                         std::uint64_t seed, const SurrogateConfig& config = {});

}  // namespace musup
