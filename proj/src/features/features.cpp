#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "common/text.hpp"
#include "musup/error.hpp"
#include "musup/features.hpp"

namespace musup::features {

std::size_t PipelineConfig::segment_length_for(double sample_rate) const {
  return segment_len ? *segment_len : dsp::default_segment_length(sample_rate);
}

void PipelineConfig::validate() const {
  if (!(band_low_hz >= 0.0 && band_low_hz < band_high_hz)) {
    throw ConfigError("band must satisfy 0 <= low < high");
  }
  if (filter.order < 1) throw ConfigError("filter order must be >= 1");
  if (!(filter.low_cut_hz > 0.0 && filter.low_cut_hz < filter.high_cut_hz)) {
    throw ConfigError("filter cutoffs must satisfy 0 < low < high");
  }
  if (channels.empty()) throw ConfigError("channel set must not be empty");
  if (segment_len && *segment_len < 8) throw ConfigError("segment length must be >= 8 samples");
}

std::vector<double> pooled_band_power(const Epoch& epoch, const PipelineConfig& cfg) {
  cfg.validate();
  const double fs = epoch.record.sample_rate();
  if (!(cfg.band_high_hz <= fs / 2.0)) {
    throw ConfigError("band upper edge exceeds the Nyquist frequency of " +
                      detail::format_double(fs / 2.0) + " Hz");
  }
  std::vector<std::string> missing;
  for (const auto& name : cfg.channels) {
    if (!epoch.record.channel_index(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ",") + m;
    throw DataError("missing channels: " + list);
  }
  const auto record = select_channels(epoch.record, cfg.channels);

  auto spec = cfg.filter;
  spec.sample_rate = fs;
  const auto cascade = dsp::design_butterworth_bandpass(spec);
  const std::size_t segment_len = cfg.segment_length_for(fs);

  std::vector<double> pooled;
  for (std::size_t c = 0; c < record.n_channels(); ++c) {
    const auto filtered = dsp::filter_signal(cascade, record.channel(c));
    for (const auto& segment : dsp::periodogram_segments(filtered, fs, segment_len)) {
      const auto band = dsp::band_extract(segment, cfg.band_low_hz, cfg.band_high_hz);
      pooled.insert(pooled.end(), band.power.begin(), band.power.end());
    }
  }
  return pooled;
}

FeatureVector extract_features(const Epoch& epoch, const PipelineConfig& cfg) {
  try {
    const auto pooled = pooled_band_power(epoch, cfg);
    const auto fit = gev::fit_gev_mle(pooled);
    if (!std::isfinite(fit.log_likelihood)) {
      throw NumericError("GEV fit has non-finite log-likelihood");
    }
    FeatureVector fv;
    fv.theta = fit.params;
    fv.label = epoch.label;
    fv.gof = gev::ks_test(pooled, fit.params);
    fv.epoch_id = epoch.epoch_id;
    fv.log_likelihood = fit.log_likelihood;
    fv.converged = fit.converged;
    fv.sample_count = pooled.size();
    return fv;
  } catch (const Error& e) {
    throw_error(e.kind(), "epoch '" + epoch.epoch_id + "': " + e.what());
  }
}

DatasetFeatures extract_dataset(const std::vector<Epoch>& epochs, const PipelineConfig& cfg) {
  if (epochs.empty()) throw DataError("no epochs to process");
  cfg.validate();

  std::vector<std::optional<FeatureVector>> results(epochs.size());
  std::vector<std::string> errors(epochs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < epochs.size(); i = next++) {
      try {
        results[i] = extract_features(epochs[i], cfg);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, epochs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  DatasetFeatures out;
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    if (results[i]) {
      out.features.push_back(std::move(*results[i]));
    } else {
      out.failures.push_back({epochs[i].epoch_id, errors[i]});
    }
  }
  if (out.features.empty()) {
    throw DataError("all " + std::to_string(epochs.size()) + " epochs failed; first: " +
                    out.failures.front().message);
  }
  return out;
}

void save_features_csv(const std::vector<FeatureVector>& features,
                       const std::filesystem::path& path) {
  std::string out = "epoch_id,label,mu,sigma,xi,ks_D,ks_p\n";
  for (const auto& f : features) {
    out += f.epoch_id + ",";
    if (f.label) out += std::to_string(label_code(*f.label));
    out += "," + detail::format_double(f.theta.location) + "," +
           detail::format_double(f.theta.scale) + "," + detail::format_double(f.theta.shape) +
           "," + detail::format_double(f.gof.ks_statistic) + "," +
           detail::format_double(f.gof.p_value) + "\n";
  }
  detail::write_file_atomic(path, out);
}

std::vector<FeatureVector> load_features_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("missing file '" + path.string() + "'");
  const std::string text = detail::read_file(path);
  const std::string where = "'" + path.string() + "'";
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<FeatureVector> out;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = detail::split(line, ',');
    if (!have_header) {
      if (line != "epoch_id,label,mu,sigma,xi,ks_D,ks_p") {
        throw DataError(where + ": expected header 'epoch_id,label,mu,sigma,xi,ks_D,ks_p'");
      }
      have_header = true;
      continue;
    }
    if (cells.size() != 7) {
      throw DataError(where + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected 7");
    }
    double values[5];
    for (std::size_t c = 2; c < 7; ++c) {
      const auto v = detail::parse_double(cells[c]);
      if (!v) {
        throw DataError(where + ": non-numeric value at line " + std::to_string(line_no) +
                        ", column " + std::to_string(c + 1));
      }
      values[c - 2] = *v;
    }
    FeatureVector fv;
    fv.epoch_id = std::string(detail::trim(cells[0]));
    fv.label = parse_label(cells[1]);
    fv.theta = {values[0], values[1], values[2]};
    fv.theta.validate();
    fv.gof.ks_statistic = values[3];
    fv.gof.p_value = values[4];
    fv.converged = true;
    out.push_back(std::move(fv));
  }
  if (!have_header) throw DataError(where + ": missing header");
  return out;
}

}  // namespace musup::features
