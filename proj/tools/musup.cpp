// musup: GEV-based mu-suppression detection from the command line.
//
//   musup synth    --per-class 10 --duration 2 --fs 512 --seed 1 --out data/
//   musup fit      --input data/manifest.csv --out fit/ --seed 1
//   musup classify --input fit/features.csv --out cv/ --seed 1
//   musup pipeline --input data/manifest.csv --out run/ --seed 1

#include <CLI11.hpp>
#include <iostream>

#include "musup/cli.hpp"
#include "musup/error.hpp"

namespace {

using musup::cli::RunConfig;

struct RunFlags {
  std::string input;
  std::string out;
  std::string band = "7.5:11.5";
  std::string filter = "8:30:4";
  std::string segment = "auto";
  std::string formats = "json,csv";
  std::string feature_map = "log-scale";
  std::string channels;
  int folds = 20;
  int repeats = 10;
  std::uint64_t seed = 0;
  double fs = 0.0;
  unsigned threads = 1;
  bool no_stratify = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool pipeline_flags, bool cv_flags) {
  cmd->add_option("--input", f.input, "Manifest CSV (fit, pipeline) or feature CSV (classify)")
      ->required();
  cmd->add_option("--out", f.out, "Output directory")->required();
  cmd->add_option("--seed", f.seed, "Seed for every randomized step")->required();
  cmd->add_option("--format", f.formats, "Comma-separated outputs: json,csv");
  if (pipeline_flags) {
    cmd->add_option("--band", f.band, "Analysis band low:high in Hz");
    cmd->add_option("--filter", f.filter, "Butterworth band low:high:order");
    cmd->add_option("--segment", f.segment, "Periodogram segment length in samples, or auto");
    cmd->add_option("--channels", f.channels, "Comma-separated channel set");
    cmd->add_option("--fs", f.fs, "Sample rate override for CSV epochs");
    cmd->add_option("--threads", f.threads, "Feature extraction threads (0 = all cores)");
  }
  if (cv_flags) {
    cmd->add_option("--folds", f.folds, "Cross-validation folds");
    cmd->add_option("--repeats", f.repeats, "Cross-validation repeats");
    cmd->add_option("--feature-map", f.feature_map, "Classifier inputs: log-scale or raw");
    cmd->add_flag("--no-stratify", f.no_stratify, "Plain k-fold instead of stratified");
  }
}

RunConfig to_config(const RunFlags& f) {
  RunConfig c;
  c.input = f.input;
  c.out = f.out;
  c.seed = f.seed;
  c.formats = musup::cli::parse_formats(f.formats);
  const auto [lo, hi] = musup::cli::parse_band(f.band);
  c.pipeline.band_low_hz = lo;
  c.pipeline.band_high_hz = hi;
  c.pipeline.filter = musup::cli::parse_filter(f.filter);
  c.pipeline.segment_len = musup::cli::parse_segment(f.segment);
  c.pipeline.threads = f.threads;
  if (!f.channels.empty()) {
    c.pipeline.channels.clear();
    std::string name;
    for (const char ch : f.channels + ",") {
      if (ch == ',') {
        if (!name.empty()) c.pipeline.channels.push_back(name);
        name.clear();
      } else {
        name += ch;
      }
    }
  }
  if (f.fs > 0.0) c.sample_rate_override = f.fs;
  c.cv.folds = f.folds;
  c.cv.repeats = f.repeats;
  c.cv.seed = f.seed;
  c.cv.stratified = !f.no_stratify;
  c.cv.feature_map = musup::classify::parse_feature_map(f.feature_map);
  return c;
}

int report_errors(const nlohmann::json& errors) {
  std::cerr << nlohmann::json{{"errors", errors}}.dump() << "\n";
  return 0;
}

int emit(const musup::cli::CommandResult& r) {
  if (!r.table.empty()) std::cout << r.table;
  if (r.exit_code != 0) report_errors(r.report.at("errors"));
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GEV mu-suppression detection"};
  app.set_version_flag("--version", musup::cli::kVersion);
  app.require_subcommand(1);

  musup::cli::SynthOptions synth;
  std::string synth_out;
  std::string gains;
  auto* synth_cmd = app.add_subcommand("synth", "Write labeled surrogate epochs and a manifest");
  synth_cmd->add_option("--per-class", synth.per_class, "Epochs per class")->required();
  synth_cmd->add_option("--duration", synth.duration_s, "Epoch duration in seconds");
  synth_cmd->add_option("--fs", synth.sample_rate, "Sample rate in Hz");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->required();
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--gains", gains, "Class gains imagery:movement:resting (default 3:2:1)");

  RunFlags fit_flags, classify_flags, pipeline_flags;
  auto* fit_cmd = app.add_subcommand("fit", "Extract GEV features from a manifest of epochs");
  add_run_flags(fit_cmd, fit_flags, true, false);
  auto* classify_cmd = app.add_subcommand("classify", "Cross-validate LDA on a feature CSV");
  add_run_flags(classify_cmd, classify_flags, false, true);
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Fit and classify in one run");
  add_run_flags(pipeline_cmd, pipeline_flags, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(musup::ErrorKind::config);
  }

  try {
    if (*synth_cmd) {
      synth.out = synth_out;
      if (!gains.empty()) musup::cli::parse_gains(gains, synth.surrogate);
      const auto manifest = musup::cli::cmd_synth(synth);
      std::cout << "wrote " << manifest.string() << "\n";
      return 0;
    }
    if (*fit_cmd) return emit(musup::cli::cmd_fit(to_config(fit_flags)));
    if (*classify_cmd) return emit(musup::cli::cmd_classify(to_config(classify_flags)));
    if (*pipeline_cmd) return emit(musup::cli::cmd_pipeline(to_config(pipeline_flags)));
  } catch (const musup::Error& e) {
    report_errors(nlohmann::json::array({{{"message", e.what()}, {"exit_code", e.exit_code()}}}));
    return e.exit_code();
  }
  return 0;
}
