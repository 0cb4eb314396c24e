#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "musup/cli.hpp"
#include "musup/error.hpp"
#include "support/oracles.hpp"
#include "support/reference_clusters.hpp"

using namespace musup;
using namespace musup::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string(MUSUP_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig quick_config(const fs::path& input, const fs::path& out) {
  RunConfig c;
  c.input = input;
  c.out = out;
  c.seed = 5;
  c.cv.folds = 4;
  c.cv.repeats = 2;
  c.timestamp = "2000-01-01T00:00:00Z";
  return c;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// One synthesized dataset shared by the tests in this file.
const fs::path& dataset() {
  static const fs::path dir = [] {
    const auto d = oracle::temp_dir("cli_data");
    SynthOptions o;
    o.per_class = 10;
    o.seed = 1;
    o.out = d;
    (void)cmd_synth(o);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("flag parsers") {
  CHECK(parse_band("7.5:11.5") == std::pair{7.5, 11.5});
  CHECK_THROWS_AS((void)parse_band("11.5:7.5"), ConfigError);
  CHECK_THROWS_AS((void)parse_band("7.5"), ConfigError);
  const auto f = parse_filter("8:30:4");
  CHECK(f.low_cut_hz == 8.0);
  CHECK(f.high_cut_hz == 30.0);
  CHECK(f.order == 4);
  CHECK_THROWS_AS((void)parse_filter("8:30:2.5"), ConfigError);
  CHECK_FALSE(parse_segment("auto").has_value());
  CHECK(*parse_segment("128") == 128);
  CHECK_THROWS_AS((void)parse_segment("4"), ConfigError);
  CHECK(parse_formats("json") == std::vector<std::string>{"json"});
  CHECK_THROWS_AS((void)parse_formats("json,xml"), ConfigError);
  SurrogateConfig s;
  parse_gains("4:2:1", s);
  CHECK(s.imagery_gain == 4.0);
  CHECK_THROWS_AS(parse_gains("1:2", s), ConfigError);
}

TEST_CASE("synth writes a balanced manifest") {
  const auto manifest = dataset() / "manifest.csv";
  const auto entries = load_manifest(manifest);
  CHECK(entries.size() == 30);
  std::array<int, 3> counts{};
  for (const auto& e : entries) {
    REQUIRE(e.label.has_value());
    ++counts[label_index(*e.label)];
    CHECK(fs::exists(dataset() / e.path));
  }
  CHECK(counts == std::array<int, 3>{10, 10, 10});
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& f : fs::directory_iterator(dataset() / "epochs")) ++files;
  CHECK(files == 30);

  const auto other = oracle::temp_dir("cli_synth2");
  SynthOptions o;
  o.per_class = 10;
  o.seed = 1;
  o.out = other;
  (void)cmd_synth(o);
  CHECK(slurp(other / "manifest.csv") == slurp(manifest));
  for (const auto& e : entries) CHECK(slurp(other / e.path) == slurp(dataset() / e.path));
  fs::remove_all(other);
}

TEST_CASE("manifest round trip and overrides") {
  const auto dir = oracle::temp_dir("cli_manifest");
  save_binary(synthesize_surrogate(EventLabel::imagery, 2.0, 512.0, 3).record, dir / "a.eegb");
  std::vector<ManifestEntry> entries{{"a.eegb", EventLabel::resting, "s7", "custom"},
                                     {"a.eegb", std::nullopt, "s7", "copy"}};
  save_manifest(entries, dir / "m.csv");
  const auto back = load_manifest(dir / "m.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].label == EventLabel::resting);
  CHECK_FALSE(back[1].label.has_value());
  const auto epochs = load_manifest_epochs(dir / "m.csv", std::nullopt);
  CHECK(epochs[0].epoch_id == "custom");
  CHECK(epochs[0].label == EventLabel::resting);
  CHECK(epochs[0].subject_id == "s7");
  fs::remove_all(dir);
}

TEST_CASE("fit report") {
  const auto out = oracle::temp_dir("cli_fit");
  const auto r = cmd_fit(quick_config(dataset() / "manifest.csv", out));
  CHECK(r.exit_code == 0);
  const auto report = read_json(out / "report.json");
  for (const auto* key : {"provenance", "features", "param_summary", "gof", "cv", "errors"}) {
    CHECK(report.contains(key));
  }
  CHECK(report["features"]["count"] == 30);
  CHECK(report["cv"].contains("skipped"));
  CHECK(report["provenance"]["seed"] == 5);
  CHECK(report["provenance"]["version"] == kVersion);
  for (const auto* cls : {"imagery", "movement", "resting"}) {
    const auto& s = report["param_summary"][cls];
    CHECK(s["count"] == 10);
    for (const auto* p : {"location", "scale", "shape"}) {
      CHECK(s[p]["ci_low"].get<double>() <= s[p]["mean"].get<double>());
      CHECK(s[p]["mean"].get<double>() <= s[p]["ci_high"].get<double>());
      const auto ci = s[p]["ci"].get<std::string>();
      CHECK(ci.front() == '[');
      CHECK(ci.back() == ']');
    }
    CHECK(fs::exists(out / (std::string("curves_") + cls + ".csv")));
  }
  const auto fvs = features::load_features_csv(out / "features.csv");
  CHECK(fvs.size() == 30);

  const auto again = oracle::temp_dir("cli_fit2");
  auto c2 = quick_config(dataset() / "manifest.csv", again);
  c2.timestamp = "2099-12-31T23:59:59Z";
  (void)cmd_fit(c2);
  auto a = read_json(out / "report.json");
  auto b = read_json(again / "report.json");
  CHECK(a["provenance"]["timestamp"] != b["provenance"]["timestamp"]);
  a["provenance"].erase("timestamp");
  b["provenance"].erase("timestamp");
  CHECK(a.dump() == b.dump());
  CHECK(slurp(out / "features.csv") == slurp(again / "features.csv"));
  fs::remove_all(out);
  fs::remove_all(again);
}

TEST_CASE("classify on reference clusters") {
  const auto dir = oracle::temp_dir("cli_classify");
  features::save_features_csv(reference::sample_clusters(20, 3), dir / "features.csv");
  auto c = quick_config(dir / "features.csv", dir / "out");
  c.cv.folds = 20;
  c.cv.repeats = 10;
  const auto r = cmd_classify(c);
  CHECK(r.exit_code == 0);
  CHECK(r.table.find("accuracy 1.000") != std::string::npos);
  const auto report = read_json(dir / "out" / "report.json");
  const auto& confusion = report["cv"]["confusion"];
  for (std::size_t t = 0; t < 3; ++t) {
    std::size_t row = 0;
    for (std::size_t p = 0; p < 3; ++p) row += confusion[t][p].get<std::size_t>();
    CHECK(row == 20 * 10);
  }
  CHECK(fs::exists(dir / "out" / "confusion.csv"));

  c.cv.folds = 50;
  const auto too_many = cmd_classify(c);
  CHECK(too_many.exit_code == 2);
  CHECK(too_many.report["errors"][0]["message"].get<std::string>().find(
            "at least 50 samples per class") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("classify rejects unlabeled features") {
  const auto dir = oracle::temp_dir("cli_unlabeled");
  auto fvs = reference::sample_clusters(5, 3);
  fvs[2].label.reset();
  features::save_features_csv(fvs, dir / "f.csv");
  const auto r = cmd_classify(quick_config(dir / "f.csv", dir / "out"));
  CHECK(r.exit_code == 3);
  CHECK(r.report["cv"].contains("failed"));
  fs::remove_all(dir);
}

TEST_CASE("pipeline equals fit then classify") {
  const auto root = oracle::temp_dir("cli_pipeline");
  const auto manifest = dataset() / "manifest.csv";
  const auto p = cmd_pipeline(quick_config(manifest, root / "pipe"));
  CHECK(p.exit_code == 0);
  const auto f = cmd_fit(quick_config(manifest, root / "fit"));
  const auto c = cmd_classify(quick_config(root / "fit" / "features.csv", root / "cls"));
  CHECK(c.exit_code == 0);

  const auto pipe = read_json(root / "pipe" / "report.json");
  const auto fit = read_json(root / "fit" / "report.json");
  const auto cls = read_json(root / "cls" / "report.json");
  for (const auto* key : {"provenance", "features", "param_summary", "gof", "cv"}) {
    CHECK(pipe.contains(key));
    CHECK_FALSE(pipe[key].contains("skipped"));
  }
  CHECK(pipe["features"] == fit["features"]);
  CHECK(pipe["param_summary"] == fit["param_summary"]);
  CHECK(pipe["gof"] == fit["gof"]);
  CHECK(pipe["cv"] == cls["cv"]);
  CHECK(slurp(root / "pipe" / "confusion.csv") == slurp(root / "cls" / "confusion.csv"));
  CHECK(p.table == c.table);
  fs::remove_all(root);
}

TEST_CASE("pipeline without labels skips classification") {
  const auto root = oracle::temp_dir("cli_nolabels");
  auto entries = load_manifest(dataset() / "manifest.csv");
  for (auto& e : entries) {
    e.path = dataset() / e.path;
    e.label.reset();
  }
  save_manifest(entries, root / "m.csv");
  const auto r = cmd_pipeline(quick_config(root / "m.csv", root / "out"));
  CHECK(r.exit_code == 0);
  CHECK(r.report["cv"]["skipped"] == "missing labels");
  CHECK(r.report["features"]["count"] == 30);
  CHECK(r.report["param_summary"]["all"]["count"] == 30);
  fs::remove_all(root);
}

TEST_CASE("missing input is a data error") {
  const auto root = oracle::temp_dir("cli_missing");
  const auto r = cmd_pipeline(quick_config(root / "nope.csv", root / "out"));
  CHECK(r.exit_code == 3);
  CHECK(r.report["features"].contains("failed"));
  CHECK(r.report["errors"].size() == 1);
  fs::remove_all(root);
}

TEST_CASE("command-line binary") {
  const auto root = oracle::temp_dir("cli_bin");
  const auto log = root / "log.txt";
  CHECK(run_cli("--version", log) == 0);
  CHECK(slurp(log).find(kVersion) != std::string::npos);

  CHECK(run_cli("synth --per-class 4 --duration 2 --fs 512 --seed 1 --out " +
                    (root / "data").string(),
                log) == 0);
  CHECK(load_manifest(root / "data" / "manifest.csv").size() == 12);

  const std::string pipe = "pipeline --input " + (root / "data" / "manifest.csv").string() +
                           " --seed 2 --repeats 1 --out ";
  CHECK(run_cli(pipe + (root / "run").string() + " --folds 4", log) == 0);
  CHECK(slurp(log).find("accuracy") != std::string::npos);
  CHECK(fs::exists(root / "run" / "report.json"));

  // Missing seed, unknown flag value, fold constraint, missing file.
  CHECK(run_cli("pipeline --input x --out y", log) == 2);
  CHECK(run_cli(pipe + (root / "bad").string() + " --folds 4 --band 12:8", log) == 2);
  CHECK(run_cli(pipe + (root / "folds").string() + " --folds 5", log) == 2);
  CHECK(slurp(log).find("\"errors\"") != std::string::npos);
  CHECK(run_cli("fit --seed 1 --out " + (root / "m").string() + " --input " +
                    (root / "absent.csv").string(),
                log) == 3);
  fs::remove_all(root);
}
