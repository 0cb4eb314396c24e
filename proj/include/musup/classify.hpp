#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "musup/eeg_core.hpp"
#include "musup/features.hpp"
#include "musup/gev.hpp"

namespace musup::classify {

using Vec3 = Eigen::Vector3d;

// How GEV parameters become classifier inputs.
//   raw:       (mu, sigma, xi)
//   log_scale: (mu / sigma, ln sigma, xi). Scale-free location plus log magnitude; keeps classes
//              whose sigma differs by orders of magnitude from dominating the pooled covariance.
enum class FeatureMap { raw, log_scale };

[[nodiscard]] Vec3 map_features(const gev::GevParams& theta, FeatureMap map);
[[nodiscard]] std::string feature_map_name(FeatureMap map);
[[nodiscard]] FeatureMap parse_feature_map(std::string_view text);

struct Standardization {
  Vec3 shift = Vec3::Zero();
  Vec3 scale = Vec3::Ones();

  [[nodiscard]] Vec3 apply(const Vec3& x) const { return (x - shift).cwiseQuotient(scale); }
};

// Shared-covariance LDA. Everything except `standardization` lives in standardized coordinates.
// Per-class arrays follow `class_labels`, which is always kEventLabels order.
struct LdaModel {
  std::array<EventLabel, 3> class_labels = kEventLabels;
  std::array<Vec3, 3> class_means;
  Eigen::Matrix3d pooled_covariance_inverse;
  std::array<double, 3> log_priors{};
  Standardization standardization;
};

struct Prediction {
  EventLabel label;
  std::array<double, 3> scores;
};

// Needs every class with at least 2 samples. Covariance and standardization use 1/n moments;
// the pooled covariance gets a 1e-8 * trace / 3 ridge before inversion.
[[nodiscard]] LdaModel lda_fit(std::span<const Vec3> x, std::span<const EventLabel> y);
[[nodiscard]] LdaModel lda_fit(const std::vector<features::FeatureVector>& features,
                               FeatureMap map = FeatureMap::log_scale);

// argmax of x' S^-1 m_k - m_k' S^-1 m_k / 2 + ln pi_k; ties go to the earlier label in
// kEventLabels. Throws DataError for non-finite input.
[[nodiscard]] Prediction lda_predict(const LdaModel& model, const Vec3& x);

struct CvConfig {
  int folds = 20;
  int repeats = 10;
  std::uint64_t seed = 0;
  bool stratified = true;
  FeatureMap feature_map = FeatureMap::log_scale;
};

// Rows are true classes, columns predictions, both in kEventLabels order.
using Confusion = std::array<std::array<std::size_t, 3>, 3>;

struct ClassRates {
  std::optional<double> sensitivity;
  std::optional<double> specificity;
};

// Undefined ratios (zero denominators) are nullopt. Throws DataError for an all-zero matrix.
[[nodiscard]] std::array<ClassRates, 3> confusion_metrics(const Confusion& confusion);

struct RepeatReport {
  Confusion confusion{};
  double accuracy = 0.0;
};

struct CvReport {
  std::array<ClassRates, 3> per_class;
  double accuracy = 0.0;
  Confusion confusion{};
  std::size_t total_predictions = 0;
  std::vector<RepeatReport> repeats;
};

// Fold index per sample for one repeat. Stratified assignment deals each shuffled class round
// the folds, continuing where the previous class stopped.
[[nodiscard]] std::vector<int> fold_assignment(std::span<const EventLabel> y,
                                               const CvConfig& cfg, int repeat);

// Called with the model trained for each (repeat, fold).
using FoldObserver = std::function<void(int repeat, int fold, const LdaModel& model)>;

// Repeated k-fold cross-validation. Inputs are used as given (no feature map applied).
[[nodiscard]] CvReport cross_validate(std::span<const Vec3> x, std::span<const EventLabel> y,
                                      const CvConfig& cfg, const FoldObserver& observer = {});
// Maps theta with cfg.feature_map first. Every vector must carry a label.
[[nodiscard]] CvReport cross_validate(const std::vector<features::FeatureVector>& features,
                                      const CvConfig& cfg, const FoldObserver& observer = {});

// Human-readable per-class table.
[[nodiscard]] std::string format_report(const CvReport& report);
void save_confusion_csv(const Confusion& confusion, const std::filesystem::path& path);

}  // namespace musup::classify
