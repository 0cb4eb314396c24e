#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "musup/dsp.hpp"
#include "musup/eeg_core.hpp"
#include "musup/error.hpp"
#include "support/oracles.hpp"

using namespace musup;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

MultichannelRecord random_record(std::size_t n, std::vector<std::string> names, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 25.0);
  std::vector<double> values(n * names.size());
  for (auto& v : values) v = dist(rng);
  return MultichannelRecord(std::move(values), n, 512.0, std::move(names));
}

double rms(const MultichannelRecord& r) {
  const auto s = r.samples();
  return std::sqrt(std::inner_product(s.begin(), s.end(), s.begin(), 0.0) /
                   static_cast<double>(s.size()));
}

}  // namespace

TEST_CASE("labels map to fixed codes") {
  CHECK(label_code(EventLabel::imagery) == 1);
  CHECK(label_code(EventLabel::movement) == 0);
  CHECK(label_code(EventLabel::resting) == -1);
  CHECK(parse_label("-1") == EventLabel::resting);
  CHECK(parse_label("imagery") == EventLabel::imagery);
  CHECK_FALSE(parse_label("").has_value());
  CHECK_THROWS_AS((void)parse_label("2"), DataError);
  CHECK(label_index(EventLabel::resting) == 2);
}

TEST_CASE("record constructor rejects inconsistent input") {
  CHECK_THROWS_AS(MultichannelRecord({1.0, 2.0, 3.0}, 2, 512.0, {"Cz", "C3"}), DataError);
  CHECK_THROWS_AS(MultichannelRecord({1.0, 2.0, 3.0, 4.0}, 2, 0.0, {"Cz", "C3"}), DataError);
  CHECK_THROWS_AS(MultichannelRecord({1.0, 2.0, 3.0, 4.0}, 2, 512.0, {"Cz", "Cz"}), DataError);
  CHECK_THROWS_AS(MultichannelRecord({1.0, 2.0, 3.0, NAN}, 2, 512.0, {"Cz", "C3"}), DataError);
}

TEST_CASE("load_csv reads a small file") {
  const auto dir = oracle::temp_dir("csv_small");
  const auto path = dir / "three.csv";
  write_text(path, "# fs=512\ntime,Cz,C3\n0,1.5,-2\n0.001953125,2.5,3\n0.00390625,4,5e-1\n");
  const auto epochs = load_csv(path);
  REQUIRE(epochs.size() == 1);
  const auto& r = epochs[0].record;
  CHECK(r.n_samples() == 3);
  CHECK(r.n_channels() == 2);
  CHECK(r.sample_rate() == 512.0);
  CHECK(r.channel_names() == std::vector<std::string>{"Cz", "C3"});
  CHECK(r.at(2, 1) == 0.5);
  CHECK(epochs[0].epoch_id == "three");
  std::filesystem::remove_all(dir);
}

TEST_CASE("load_csv error reporting") {
  const auto dir = oracle::temp_dir("csv_err");
  SUBCASE("blank cell names row and column") {
    write_text(dir / "a.csv", "# fs=512\ntime,Cz,C3\n0,1,2\n0.1,,3\n");
    try {
      (void)load_csv(dir / "a.csv");
      FAIL("expected an error");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("line 4") != std::string::npos);
      CHECK(msg.find("column 2") != std::string::npos);
    }
  }
  SUBCASE("ragged row") {
    write_text(dir / "b.csv", "# fs=512\ntime,Cz,C3\n0,1,2\n0.1,3\n");
    CHECK_THROWS_AS((void)load_csv(dir / "b.csv"), DataError);
  }
  SUBCASE("missing rate unless overridden") {
    write_text(dir / "c.csv", "time,Cz\n0,1\n1,2\n");
    CHECK_THROWS_AS((void)load_csv(dir / "c.csv"), DataError);
    CHECK(load_csv(dir / "c.csv", 256.0)[0].record.sample_rate() == 256.0);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS((void)load_csv(dir / "nope.csv"), DataError);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv round trip is bit exact") {
  const auto dir = oracle::temp_dir("csv_rt");
  const auto original = random_record(257, {"C5", "C3", "Cz"}, 11);
  save_csv(original, dir / "r.csv");
  const auto loaded = load_csv(dir / "r.csv");
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].record == original);
  std::filesystem::remove_all(dir);
}

TEST_CASE("binary format") {
  const auto dir = oracle::temp_dir("bin");
  SUBCASE("hand-built header and payload") {
    std::string bytes = "EEGB";
    const auto put = [&bytes](const void* p, std::size_t n) {
      bytes.append(static_cast<const char*>(p), n);
    };
    const std::uint32_t channels = 2, samples = 4;
    const double fs = 512.0;
    put(&channels, 4);
    put(&samples, 4);
    put(&fs, 8);
    for (const std::string name : {"Cz", "C3"}) {
      const auto len = static_cast<std::uint16_t>(name.size());
      put(&len, 2);
      bytes += name;
    }
    for (int i = 0; i < 8; ++i) {
      const double v = i * 0.25;
      put(&v, 8);
    }
    write_text(dir / "h.eegb", bytes);
    const auto epochs = load_binary(dir / "h.eegb");
    REQUIRE(epochs.size() == 1);
    CHECK(epochs[0].record.n_samples() == 4);
    CHECK(epochs[0].record.n_channels() == 2);
    CHECK(epochs[0].record.at(3, 1) == 1.75);

    write_text(dir / "t.eegb", bytes.substr(0, bytes.size() - 5));
    try {
      (void)load_binary(dir / "t.eegb");
      FAIL("expected truncation error");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("expected 92 bytes") != std::string::npos);
      CHECK(msg.find("got 87") != std::string::npos);
    }
  }
  SUBCASE("three bytes is a bad magic") {
    write_text(dir / "x.eegb", "EEG");
    CHECK_THROWS_WITH_AS((void)load_binary(dir / "x.eegb"), doctest::Contains("magic"),
                         DataError);
  }
  SUBCASE("round trip") {
    const auto original = random_record(300, central_motor_channels(), 5);
    save_binary(original, dir / "r.eegb");
    CHECK(load_epochs(dir / "r.eegb")[0].record == original);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("select_channels") {
  std::vector<std::string> names;
  for (int i = 0; i < 57; ++i) names.push_back("E" + std::to_string(i));
  for (const auto& c : central_motor_channels()) names.push_back(c);
  std::shuffle(names.begin(), names.end(), std::mt19937(3));
  const auto full = random_record(20, names, 9);
  REQUIRE(full.n_channels() == 64);

  const auto& motor = central_motor_channels();
  const auto picked = select_channels(full, motor);
  CHECK(picked.channel_names() == motor);
  CHECK(picked.n_samples() == 20);
  const auto src = *full.channel_index("Cz");
  for (std::size_t n = 0; n < 20; ++n) CHECK(picked.at(n, 3) == full.at(n, src));

  CHECK(select_channels(full, full.channel_names()) == full);
  const std::vector<std::string> bad{"Xz"};
  CHECK_THROWS_WITH_AS((void)select_channels(full, bad), doctest::Contains("Xz"), DataError);

  const std::vector<std::string> sub{"C4", "Cz"};
  CHECK(select_channels(select_channels(full, motor), sub) == select_channels(full, sub));
}

TEST_CASE("surrogate epochs") {
  const auto a = synthesize_surrogate(EventLabel::imagery, 2.0, 512.0, 1);
  const auto b = synthesize_surrogate(EventLabel::imagery, 2.0, 512.0, 1);
  CHECK(a.record == b.record);
  CHECK(a.record.n_channels() == 7);
  CHECK(a.record.n_samples() == 1024);
  CHECK(a.label == EventLabel::imagery);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double ri = rms(synthesize_surrogate(EventLabel::imagery, 2.0, 512.0, seed).record);
    const double rm = rms(synthesize_surrogate(EventLabel::movement, 2.0, 512.0, seed).record);
    const double rr = rms(synthesize_surrogate(EventLabel::resting, 2.0, 512.0, seed).record);
    CHECK(ri > rm);
    CHECK(rm > rr);
  }

  CHECK_THROWS_AS((void)synthesize_surrogate(EventLabel::resting, 0.0, 512.0, 1), ConfigError);
  CHECK_THROWS_AS((void)synthesize_surrogate(EventLabel::resting, 1.0, 32.0, 1), ConfigError);
}

TEST_CASE("surrogate power stays in band") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto e = synthesize_surrogate(EventLabel::movement, 2.0, 512.0, seed);
    for (std::size_t c = 0; c < e.record.n_channels(); ++c) {
      const auto x = e.record.channel(c);
      // Whole-epoch rectangular DFT; the generator's components sit exactly on its bins.
      const std::vector<double> ones(x.size(), 1.0);
      double inside = 0.0, total = 0.0;
      for (std::size_t k = 0; k <= x.size() / 2; ++k) {
        const double f = static_cast<double>(k) * 512.0 / static_cast<double>(x.size());
        const double p = oracle::direct_periodogram_value(x, ones, f, 512.0);
        total += p;
        if (f >= 4.0 && f <= 40.0) inside += p;
      }
      CHECK((total - inside) / total < 0.01);
    }
  }
}
