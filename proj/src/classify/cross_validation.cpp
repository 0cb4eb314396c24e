#include <algorithm>
#include <iomanip>
#include <random>
#include <sstream>

#include "common/text.hpp"
#include "musup/classify.hpp"
#include "musup/error.hpp"

namespace musup::classify {
namespace {

// splitmix64 finalizer; decorrelates per-repeat seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void validate(std::span<const EventLabel> y, const CvConfig& cfg) {
  if (cfg.folds < 2) throw ConfigError("folds must be >= 2");
  if (cfg.repeats < 1) throw ConfigError("repeats must be >= 1");
  std::array<std::size_t, 3> counts{};
  for (const auto label : y) ++counts[label_index(label)];
  const auto folds = static_cast<std::size_t>(cfg.folds);
  if (cfg.stratified) {
    for (std::size_t k = 0; k < 3; ++k) {
      if (counts[k] < folds) {
        throw ConfigError("stratified " + std::to_string(cfg.folds) +
                          "-fold cross-validation needs at least " + std::to_string(cfg.folds) +
                          " samples per class; class " +
                          std::string(label_name(kEventLabels[k])) + " has " +
                          std::to_string(counts[k]));
      }
    }
  } else if (y.size() < folds) {
    throw ConfigError(std::to_string(cfg.folds) + "-fold cross-validation needs at least " +
                      std::to_string(cfg.folds) + " samples, got " + std::to_string(y.size()));
  }
}

}  // namespace

std::array<ClassRates, 3> confusion_metrics(const Confusion& confusion) {
  std::size_t total = 0;
  std::array<std::size_t, 3> row{};
  std::array<std::size_t, 3> col{};
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t p = 0; p < 3; ++p) {
      total += confusion[t][p];
      row[t] += confusion[t][p];
      col[p] += confusion[t][p];
    }
  }
  if (total == 0) throw DataError("confusion matrix is empty");

  std::array<ClassRates, 3> out;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t tp = confusion[k][k];
    const std::size_t fn = row[k] - tp;
    const std::size_t fp = col[k] - tp;
    const std::size_t tn = total - tp - fn - fp;
    if (tp + fn > 0) out[k].sensitivity = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (tn + fp > 0) out[k].specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
  }
  return out;
}

std::vector<int> fold_assignment(std::span<const EventLabel> y, const CvConfig& cfg, int repeat) {
  validate(y, cfg);
  std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(repeat)));
  std::vector<int> folds(y.size(), 0);
  if (!cfg.stratified) {
    std::vector<std::size_t> order(y.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t j = 0; j < order.size(); ++j) {
      folds[order[j]] = static_cast<int>(j % static_cast<std::size_t>(cfg.folds));
    }
    return folds;
  }
  std::size_t offset = 0;
  for (const auto label : kEventLabels) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == label) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t j = 0; j < members.size(); ++j) {
      folds[members[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(cfg.folds));
    }
    offset += members.size();
  }
  return folds;
}

CvReport cross_validate(std::span<const Vec3> x, std::span<const EventLabel> y,
                        const CvConfig& cfg, const FoldObserver& observer) {
  if (x.size() != y.size()) throw DataError("feature and label counts differ");
  validate(y, cfg);

  CvReport report;
  for (int r = 0; r < cfg.repeats; ++r) {
    const auto folds = fold_assignment(y, cfg, r);
    RepeatReport rep;
    for (int f = 0; f < cfg.folds; ++f) {
      std::vector<Vec3> train_x;
      std::vector<EventLabel> train_y;
      std::vector<std::size_t> test;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (folds[i] == f) {
          test.push_back(i);
        } else {
          train_x.push_back(x[i]);
          train_y.push_back(y[i]);
        }
      }
      if (test.empty()) continue;
      const auto model = lda_fit(train_x, train_y);
      if (observer) observer(r, f, model);
      for (const auto i : test) {
        const auto pred = lda_predict(model, x[i]);
        ++rep.confusion[label_index(y[i])][label_index(pred.label)];
      }
    }
    std::size_t correct = 0;
    std::size_t total = 0;
    for (std::size_t t = 0; t < 3; ++t) {
      for (std::size_t p = 0; p < 3; ++p) {
        total += rep.confusion[t][p];
        report.confusion[t][p] += rep.confusion[t][p];
        if (t == p) correct += rep.confusion[t][p];
      }
    }
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(total);
    report.repeats.push_back(rep);
  }

  std::size_t correct = 0;
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t p = 0; p < 3; ++p) report.total_predictions += report.confusion[t][p];
    correct += report.confusion[t][t];
  }
  report.accuracy =
      static_cast<double>(correct) / static_cast<double>(report.total_predictions);
  report.per_class = confusion_metrics(report.confusion);
  return report;
}

CvReport cross_validate(const std::vector<features::FeatureVector>& features,
                        const CvConfig& cfg, const FoldObserver& observer) {
  std::vector<Vec3> x;
  std::vector<EventLabel> y;
  for (const auto& f : features) {
    if (!f.label) throw DataError("feature vector '" + f.epoch_id + "' has no label");
    x.push_back(map_features(f.theta, cfg.feature_map));
    y.push_back(*f.label);
  }
  return cross_validate(x, y, cfg, observer);
}

std::string format_report(const CvReport& report) {
  const auto cell = [](const std::optional<double>& v) {
    std::ostringstream ss;
    if (v) {
      ss << std::fixed << std::setprecision(3) << *v;
    } else {
      ss << "n/a";
    }
    return ss.str();
  };
  std::ostringstream ss;
  ss << std::left << std::setw(10) << "class" << std::right << std::setw(13) << "sensitivity"
     << std::setw(13) << "specificity" << "\n";
  for (std::size_t k = 0; k < 3; ++k) {
    ss << std::left << std::setw(10) << label_name(kEventLabels[k]) << std::right << std::setw(13)
       << cell(report.per_class[k].sensitivity) << std::setw(13)
       << cell(report.per_class[k].specificity) << "\n";
  }
  ss << "accuracy " << std::fixed << std::setprecision(3) << report.accuracy << " over "
     << report.total_predictions << " predictions (" << report.repeats.size() << " repeats)\n";
  return ss.str();
}

void save_confusion_csv(const Confusion& confusion, const std::filesystem::path& path) {
  std::string out = "true\\predicted";
  for (const auto label : kEventLabels) out += "," + std::to_string(label_code(label));
  out += "\n";
  for (std::size_t t = 0; t < 3; ++t) {
    out += std::to_string(label_code(kEventLabels[t]));
    for (std::size_t p = 0; p < 3; ++p) out += "," + std::to_string(confusion[t][p]);
    out += "\n";
  }
  detail::write_file_atomic(path, out);
}

}  // namespace musup::classify
