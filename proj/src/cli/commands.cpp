#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "common/text.hpp"
#include "musup/cli.hpp"
#include "musup/error.hpp"

namespace musup::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t epoch_seed(std::uint64_t seed, std::size_t class_index, int index) {
  std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (class_index * 1000003ULL +
                                                     static_cast<std::uint64_t>(index) + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json skipped(const std::string& reason) { return json{{"skipped", reason}}; }
json failed(const Error& e) {
  return json{{"failed", e.what()}, {"exit_code", e.exit_code()}};
}

json error_entry(const Error& e) {
  static const char* names[] = {"", "", "config", "data", "numeric"};
  return json{{"kind", names[e.exit_code()]}, {"message", e.what()}, {"exit_code", e.exit_code()}};
}

json provenance(const RunConfig& c, const std::string& command) {
  const auto& p = c.pipeline;
  json segment = p.segment_len ? json(*p.segment_len) : json("auto");
  json cfg = {
      {"input", c.input.generic_string()},
      {"band_hz", {p.band_low_hz, p.band_high_hz}},
      {"filter", {{"order", p.filter.order},
                  {"low_cut_hz", p.filter.low_cut_hz},
                  {"high_cut_hz", p.filter.high_cut_hz}}},
      {"segment", segment},
      {"channels", p.channels},
      {"folds", c.cv.folds},
      {"repeats", c.cv.repeats},
      {"stratified", c.cv.stratified},
      {"feature_map", classify::feature_map_name(c.cv.feature_map)},
      {"formats", c.formats},
      {"fs_override", c.sample_rate_override ? json(*c.sample_rate_override) : json(nullptr)},
  };
  return json{{"tool", "musup"},
              {"version", kVersion},
              {"command", command},
              {"seed", c.seed},
              {"timestamp", c.timestamp ? *c.timestamp : utc_now()},
              {"config", cfg}};
}

json rates_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json gof_json(const std::vector<features::FeatureVector>& fvs) {
  if (fvs.empty()) return skipped("no feature vectors");
  double sum_d = 0.0, max_d = 0.0, sum_p = 0.0, max_err = 0.0;
  std::size_t significant = 0;
  for (const auto& f : fvs) {
    sum_d += f.gof.ks_statistic;
    max_d = std::max(max_d, f.gof.ks_statistic);
    sum_p += f.gof.p_value;
    max_err = std::max(max_err, std::abs(f.gof.max_cdf_error));
    if (f.gof.p_value <= 0.05) ++significant;
  }
  const double n = static_cast<double>(fvs.size());
  return json{{"count", fvs.size()},
              {"mean_ks_statistic", sum_d / n},
              {"max_ks_statistic", max_d},
              {"mean_p_value", sum_p / n},
              {"fraction_p_le_0_05", static_cast<double>(significant) / n},
              {"max_abs_cdf_error", max_err}};
}

// Per-class summaries plus "all"; writes curve CSVs for classes that have fits.
json summarize_and_plot(const std::vector<features::FeatureVector>& fvs, const RunConfig& c) {
  json out = json::object();
  const auto summarize = [&](const std::vector<gev::GevParams>& fits, const std::string& key) {
    if (fits.size() < 2) {
      out[key] = skipped(std::to_string(fits.size()) + " fit(s); need at least 2");
    } else {
      out[key] = to_json(gev::summarize_params(fits));
    }
  };
  std::vector<gev::GevParams> all;
  for (const auto& f : fvs) all.push_back(f.theta);
  for (const auto label : kEventLabels) {
    std::vector<gev::GevParams> fits;
    for (const auto& f : fvs) {
      if (f.label == label) fits.push_back(f.theta);
    }
    const std::string name(label_name(label));
    summarize(fits, name);
    if (!fits.empty() && c.wants("csv")) {
      gev::GevParams mean{0.0, 0.0, 0.0};
      for (const auto& p : fits) {
        mean.location += p.location;
        mean.scale += p.scale;
        mean.shape += p.shape;
      }
      const double n = static_cast<double>(fits.size());
      mean = {mean.location / n, mean.scale / n, mean.shape / n};
      gev::save_curve_csv(gev::curve(mean), c.out / ("curves_" + name + ".csv"));
    }
  }
  summarize(all, "all");
  return out;
}

void write_report(const RunConfig& c, const json& report) {
  if (c.wants("json")) detail::write_file_atomic(c.out / "report.json", report.dump(2) + "\n");
}

void prepare_out(const RunConfig& c) {
  if (c.out.empty()) throw ConfigError("--out is required");
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec || !fs::is_directory(c.out)) {
    throw ConfigError("cannot create output directory '" + c.out.string() + "'");
  }
}

struct FitStage {
  std::optional<features::DatasetFeatures> dataset;
  json features;
  json param_summary;
  json gof;
  std::vector<json> errors;
  int exit_code = 0;
};

FitStage run_fit_stage(const RunConfig& c) {
  FitStage s;
  try {
    const auto epochs = load_manifest_epochs(c.input, c.sample_rate_override);
    auto dataset = features::extract_dataset(epochs, c.pipeline);
    s.features = to_json(dataset);
    s.param_summary = summarize_and_plot(dataset.features, c);
    s.gof = gof_json(dataset.features);
    if (c.wants("csv")) features::save_features_csv(dataset.features, c.out / "features.csv");
    s.dataset = std::move(dataset);
  } catch (const Error& e) {
    s.features = failed(e);
    s.param_summary = skipped("feature extraction failed");
    s.gof = skipped("feature extraction failed");
    s.errors.push_back(error_entry(e));
    s.exit_code = e.exit_code();
  }
  return s;
}

struct CvStage {
  json cv;
  std::string table;
  std::vector<json> errors;
  int exit_code = 0;
};

CvStage run_cv_stage(const RunConfig& c, const std::vector<features::FeatureVector>& fvs) {
  CvStage s;
  try {
    auto cfg = c.cv;
    cfg.seed = c.seed;
    const auto report = classify::cross_validate(fvs, cfg);
    s.cv = to_json(report, cfg);
    s.table = classify::format_report(report);
    if (c.wants("csv")) classify::save_confusion_csv(report.confusion, c.out / "confusion.csv");
  } catch (const Error& e) {
    s.cv = failed(e);
    s.errors.push_back(error_entry(e));
    s.exit_code = e.exit_code();
  }
  return s;
}

bool all_labeled(const std::vector<features::FeatureVector>& fvs) {
  return std::all_of(fvs.begin(), fvs.end(), [](const auto& f) { return f.label.has_value(); });
}

CommandResult finish(const RunConfig& c, json report, std::vector<json> errors, int exit_code,
                     std::string table = {}) {
  report["errors"] = errors;
  write_report(c, report);
  return {exit_code, std::move(report), std::move(table)};
}

CommandResult config_failure(const RunConfig& c, const std::string& command, const Error& e) {
  json report = {{"provenance", provenance(c, command)},
                 {"features", skipped("not run")},
                 {"param_summary", skipped("not run")},
                 {"gof", skipped("not run")},
                 {"cv", skipped("not run")},
                 {"errors", json::array({error_entry(e)})}};
  return {e.exit_code(), std::move(report), {}};
}

}  // namespace

bool RunConfig::wants(std::string_view format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

std::pair<double, double> parse_band(std::string_view text) {
  const auto parts = detail::split(text, ':');
  if (parts.size() == 2) {
    const auto lo = detail::parse_double(parts[0]);
    const auto hi = detail::parse_double(parts[1]);
    if (lo && hi && *lo < *hi) return {*lo, *hi};
  }
  throw ConfigError("invalid band '" + std::string(text) + "' (expected low:high)");
}

dsp::FilterSpec parse_filter(std::string_view text) {
  const auto parts = detail::split(text, ':');
  if (parts.size() == 3) {
    const auto lo = detail::parse_double(parts[0]);
    const auto hi = detail::parse_double(parts[1]);
    const auto order = detail::parse_double(parts[2]);
    if (lo && hi && order && *order >= 1 && *order == std::floor(*order) && *lo > 0 &&
        *lo < *hi) {
      return {static_cast<int>(*order), *lo, *hi, 512.0};
    }
  }
  throw ConfigError("invalid filter '" + std::string(text) + "' (expected low:high:order)");
}

std::optional<std::size_t> parse_segment(std::string_view text) {
  if (text == "auto") return std::nullopt;
  const auto v = detail::parse_double(text);
  if (!v || *v < 8 || *v != std::floor(*v)) {
    throw ConfigError("invalid segment '" + std::string(text) + "' (expected auto or >= 8)");
  }
  return static_cast<std::size_t>(*v);
}

std::vector<std::string> parse_formats(std::string_view text) {
  std::vector<std::string> out;
  for (const auto part : detail::split(text, ',')) {
    const auto f = detail::trim(part);
    if (f != "json" && f != "csv") {
      throw ConfigError("unknown format '" + std::string(f) + "' (expected json,csv)");
    }
    out.emplace_back(f);
  }
  return out;
}

void parse_gains(std::string_view text, SurrogateConfig& config) {
  const auto parts = detail::split(text, ':');
  if (parts.size() == 3) {
    const auto a = detail::parse_double(parts[0]);
    const auto b = detail::parse_double(parts[1]);
    const auto r = detail::parse_double(parts[2]);
    if (a && b && r && *a > 0 && *b > 0 && *r > 0) {
      config.imagery_gain = *a;
      config.movement_gain = *b;
      config.resting_gain = *r;
      return;
    }
  }
  throw ConfigError("invalid gains '" + std::string(text) + "' (expected imagery:movement:resting)");
}

std::vector<ManifestEntry> load_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("missing manifest '" + path.string() + "'");
  const std::string text = detail::read_file(path);
  std::istringstream in(text);
  std::string raw;
  bool have_header = false;
  std::size_t line_no = 0;
  std::vector<ManifestEntry> out;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      if (line != "path,label,subject_id,epoch_id") {
        throw DataError("manifest '" + path.string() +
                        "': expected header 'path,label,subject_id,epoch_id'");
      }
      have_header = true;
      continue;
    }
    const auto cells = detail::split(line, ',');
    if (cells.size() != 4) {
      throw DataError("manifest '" + path.string() + "': line " + std::to_string(line_no) +
                      " has " + std::to_string(cells.size()) + " cells, expected 4");
    }
    ManifestEntry e;
    e.path = fs::path(std::string(detail::trim(cells[0])));
    e.label = parse_label(cells[1]);
    e.subject_id = std::string(detail::trim(cells[2]));
    e.epoch_id = std::string(detail::trim(cells[3]));
    if (e.epoch_id.empty()) e.epoch_id = e.path.stem().string();
    out.push_back(std::move(e));
  }
  if (!have_header) throw DataError("manifest '" + path.string() + "' is empty");
  return out;
}

void save_manifest(const std::vector<ManifestEntry>& entries, const fs::path& path) {
  std::string out = "path,label,subject_id,epoch_id\n";
  for (const auto& e : entries) {
    out += e.path.generic_string() + ",";
    if (e.label) out += std::to_string(label_code(*e.label));
    out += "," + e.subject_id + "," + e.epoch_id + "\n";
  }
  detail::write_file_atomic(path, out);
}

std::vector<Epoch> load_manifest_epochs(const fs::path& manifest,
                                        std::optional<double> sample_rate_override) {
  const auto entries = load_manifest(manifest);
  if (entries.empty()) throw DataError("manifest '" + manifest.string() + "' lists no epochs");
  const auto base = manifest.parent_path();
  std::vector<Epoch> epochs;
  for (const auto& e : entries) {
    const auto file = e.path.is_absolute() ? e.path : base / e.path;
    for (auto& epoch : load_epochs(file, sample_rate_override)) {
      epoch.label = e.label;
      epoch.subject_id = e.subject_id;
      epoch.epoch_id = e.epoch_id;
      epochs.push_back(std::move(epoch));
    }
  }
  return epochs;
}

fs::path cmd_synth(const SynthOptions& o) {
  if (o.per_class < 1) throw ConfigError("--per-class must be >= 1");
  if (o.out.empty()) throw ConfigError("--out is required");
  std::error_code ec;
  fs::create_directories(o.out / "epochs", ec);
  if (ec) throw ConfigError("cannot create '" + (o.out / "epochs").string() + "': " + ec.message());

  std::vector<ManifestEntry> entries;
  for (std::size_t k = 0; k < kEventLabels.size(); ++k) {
    const auto label = kEventLabels[k];
    for (int i = 0; i < o.per_class; ++i) {
      const auto epoch = synthesize_surrogate(label, o.duration_s, o.sample_rate,
                                              epoch_seed(o.seed, k, i), o.surrogate);
      char id[64];
      std::snprintf(id, sizeof(id), "%s_%04d", std::string(label_name(label)).c_str(), i);
      const fs::path rel = fs::path("epochs") / (std::string(id) + ".eegb");
      save_binary(epoch.record, o.out / rel);
      entries.push_back({rel, label, "surrogate", id});
    }
  }
  const auto manifest = o.out / "manifest.csv";
  save_manifest(entries, manifest);
  return manifest;
}

CommandResult cmd_fit(const RunConfig& c) {
  try {
    c.pipeline.validate();
    prepare_out(c);
  } catch (const Error& e) {
    return config_failure(c, "fit", e);
  }
  auto stage = run_fit_stage(c);
  json report = {{"provenance", provenance(c, "fit")},
                 {"features", stage.features},
                 {"param_summary", stage.param_summary},
                 {"gof", stage.gof},
                 {"cv", skipped("fit command does not classify")}};
  return finish(c, std::move(report), std::move(stage.errors), stage.exit_code);
}

CommandResult cmd_classify(const RunConfig& c) {
  try {
    prepare_out(c);
  } catch (const Error& e) {
    return config_failure(c, "classify", e);
  }
  json report = {{"provenance", provenance(c, "classify")},
                 {"features", skipped("features read from " + c.input.generic_string())},
                 {"param_summary", skipped("classify command does not fit")},
                 {"gof", skipped("classify command does not fit")}};
  std::vector<json> errors;
  std::vector<features::FeatureVector> fvs;
  try {
    fvs = features::load_features_csv(c.input);
    if (fvs.empty()) throw DataError("feature file '" + c.input.string() + "' has no rows");
    for (const auto& f : fvs) {
      if (!f.label) throw DataError("unlabeled feature vector '" + f.epoch_id + "'");
    }
  } catch (const Error& e) {
    report["cv"] = failed(e);
    errors.push_back(error_entry(e));
    return finish(c, std::move(report), std::move(errors), e.exit_code());
  }
  auto stage = run_cv_stage(c, fvs);
  report["cv"] = stage.cv;
  return finish(c, std::move(report), std::move(stage.errors), stage.exit_code,
                std::move(stage.table));
}

CommandResult cmd_pipeline(const RunConfig& c) {
  try {
    c.pipeline.validate();
    prepare_out(c);
  } catch (const Error& e) {
    return config_failure(c, "pipeline", e);
  }
  auto fit = run_fit_stage(c);
  json report = {{"provenance", provenance(c, "pipeline")},
                 {"features", fit.features},
                 {"param_summary", fit.param_summary},
                 {"gof", fit.gof}};
  auto errors = std::move(fit.errors);
  int exit_code = fit.exit_code;
  std::string table;
  if (!fit.dataset) {
    report["cv"] = skipped("feature extraction failed");
  } else if (!all_labeled(fit.dataset->features)) {
    report["cv"] = skipped("missing labels");
  } else {
    auto cv = run_cv_stage(c, fit.dataset->features);
    report["cv"] = cv.cv;
    table = std::move(cv.table);
    errors.insert(errors.end(), cv.errors.begin(), cv.errors.end());
    if (exit_code == 0) exit_code = cv.exit_code;
  }
  return finish(c, std::move(report), std::move(errors), exit_code, std::move(table));
}

json to_json(const features::DatasetFeatures& dataset) {
  json vectors = json::array();
  for (const auto& f : dataset.features) {
    vectors.push_back({{"epoch_id", f.epoch_id},
                       {"label", f.label ? json(label_code(*f.label)) : json(nullptr)},
                       {"mu", f.theta.location},
                       {"sigma", f.theta.scale},
                       {"xi", f.theta.shape},
                       {"log_likelihood", f.log_likelihood},
                       {"converged", f.converged},
                       {"n", f.sample_count},
                       {"ks", {{"D", f.gof.ks_statistic},
                               {"p", f.gof.p_value},
                               {"max_cdf_error", f.gof.max_cdf_error}}}});
  }
  json failures = json::array();
  for (const auto& f : dataset.failures) {
    failures.push_back({{"epoch_id", f.epoch_id}, {"message", f.message}});
  }
  return json{{"count", dataset.features.size()}, {"vectors", vectors}, {"failures", failures}};
}

json to_json(const gev::ParamSummary& summary) {
  const auto interval = [](const gev::Interval& i) {
    std::ostringstream ci;
    ci << std::fixed << std::setprecision(2) << "[" << i.ci_low << ", " << i.ci_high << "]";
    return json{{"mean", i.mean},
                {"ci_low", i.ci_low},
                {"ci_high", i.ci_high},
                {"ci", ci.str()},
                {"rendered", gev::format_interval(i)}};
  };
  return json{{"count", summary.count},
              {"location", interval(summary.location)},
              {"scale", interval(summary.scale)},
              {"shape", interval(summary.shape)}};
}

json to_json(const classify::CvReport& report, const classify::CvConfig& config) {
  const auto matrix = [](const classify::Confusion& m) {
    json rows = json::array();
    for (const auto& r : m) rows.push_back(json(r));
    return rows;
  };
  json per_class = json::object();
  for (std::size_t k = 0; k < 3; ++k) {
    per_class[std::string(label_name(kEventLabels[k]))] = {
        {"sensitivity", rates_json(report.per_class[k].sensitivity)},
        {"specificity", rates_json(report.per_class[k].specificity)}};
  }
  json repeats = json::array();
  for (const auto& r : report.repeats) {
    repeats.push_back({{"accuracy", r.accuracy}, {"confusion", matrix(r.confusion)}});
  }
  json labels = json::array();
  for (const auto label : kEventLabels) labels.push_back(label_code(label));
  return json{{"folds", config.folds},
              {"repeats", config.repeats},
              {"seed", config.seed},
              {"stratified", config.stratified},
              {"feature_map", classify::feature_map_name(config.feature_map)},
              {"labels", labels},
              {"accuracy", report.accuracy},
              {"total_predictions", report.total_predictions},
              {"confusion", matrix(report.confusion)},
              {"per_class", per_class},
              {"per_repeat", repeats}};
}

}  // namespace musup::cli
