#include <algorithm>
#include <cmath>
#include <set>

#include "common/text.hpp"
#include "musup/eeg_core.hpp"
#include "musup/error.hpp"

namespace musup {

std::string_view label_name(EventLabel label) {
  switch (label) {
    case EventLabel::imagery:
      return "imagery";
    case EventLabel::movement:
      return "movement";
    case EventLabel::resting:
      return "resting";
  }
  return "unknown";
}

std::optional<EventLabel> label_from_code(int code) {
  for (const auto label : kEventLabels) {
    if (label_code(label) == code) return label;
  }
  return std::nullopt;
}

std::optional<EventLabel> parse_label(std::string_view text) {
  text = detail::trim(text);
  if (text.empty()) return std::nullopt;
  for (const auto label : kEventLabels) {
    if (text == label_name(label)) return label;
  }
  const auto value = detail::parse_double(text);
  if (!value || *value != std::floor(*value)) {
    throw DataError("invalid event label '" + std::string(text) + "'");
  }
  const auto label = label_from_code(static_cast<int>(*value));
  if (!label) throw DataError("invalid event label '" + std::string(text) + "'");
  return label;
}

std::size_t label_index(EventLabel label) {
  return static_cast<std::size_t>(
      std::find(kEventLabels.begin(), kEventLabels.end(), label) - kEventLabels.begin());
}

const std::vector<std::string>& central_motor_channels() {
  static const std::vector<std::string> channels{"C5", "C3", "C1", "Cz", "C2", "C4", "C6"};
  return channels;
}

MultichannelRecord::MultichannelRecord(std::vector<double> samples, std::size_t n_samples,
                                       double sample_rate, std::vector<std::string> channel_names)
    : samples_(std::move(samples)),
      n_samples_(n_samples),
      sample_rate_(sample_rate),
      channel_names_(std::move(channel_names)) {
  if (n_samples_ < 2) throw DataError("record needs at least 2 samples");
  if (channel_names_.empty()) throw DataError("record needs at least 1 channel");
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
    throw DataError("sample rate must be positive and finite");
  }
  if (samples_.size() != n_samples_ * channel_names_.size()) {
    throw DataError("sample matrix size does not match " + std::to_string(n_samples_) + " x " +
                    std::to_string(channel_names_.size()));
  }
  std::set<std::string> seen;
  for (const auto& name : channel_names_) {
    if (!seen.insert(name).second) throw DataError("duplicate channel name '" + name + "'");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw DataError("non-finite sample at row " + std::to_string(i / n_channels()) +
                      ", channel '" + channel_names_[i % n_channels()] + "'");
    }
  }
}

std::vector<double> MultichannelRecord::channel(std::size_t index) const {
  std::vector<double> out(n_samples_);
  for (std::size_t n = 0; n < n_samples_; ++n) out[n] = at(n, index);
  return out;
}

std::optional<std::size_t> MultichannelRecord::channel_index(std::string_view name) const {
  const auto it = std::find(channel_names_.begin(), channel_names_.end(), name);
  if (it == channel_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - channel_names_.begin());
}

MultichannelRecord select_channels(const MultichannelRecord& record,
                                   std::span<const std::string> names) {
  std::vector<std::size_t> columns;
  columns.reserve(names.size());
  for (const auto& name : names) {
    const auto idx = record.channel_index(name);
    if (!idx) throw DataError("unknown channel '" + name + "'");
    columns.push_back(*idx);
  }
  std::vector<double> samples;
  samples.reserve(record.n_samples() * columns.size());
  for (std::size_t n = 0; n < record.n_samples(); ++n) {
    for (const auto c : columns) samples.push_back(record.at(n, c));
  }
  return MultichannelRecord(std::move(samples), record.n_samples(), record.sample_rate(),
                            {names.begin(), names.end()});
}

std::vector<Epoch> load_epochs(const std::filesystem::path& path,
                               std::optional<double> sample_rate_override) {
  if (path.extension() == ".eegb") return load_binary(path);
  return load_csv(path, sample_rate_override);
}

}  // namespace musup
