#include <cmath>
#include <limits>

#include "musup/classify.hpp"
#include "musup/error.hpp"

namespace musup::classify {

Vec3 map_features(const gev::GevParams& theta, FeatureMap map) {
  theta.validate();
  if (map == FeatureMap::raw) return {theta.location, theta.scale, theta.shape};
  return {theta.location / theta.scale, std::log(theta.scale), theta.shape};
}

std::string feature_map_name(FeatureMap map) {
  return map == FeatureMap::raw ? "raw" : "log-scale";
}

FeatureMap parse_feature_map(std::string_view text) {
  if (text == "raw") return FeatureMap::raw;
  if (text == "log-scale") return FeatureMap::log_scale;
  throw ConfigError("unknown feature map '" + std::string(text) + "' (expected raw|log-scale)");
}

LdaModel lda_fit(std::span<const Vec3> x, std::span<const EventLabel> y) {
  if (x.size() != y.size()) throw DataError("feature and label counts differ");
  std::array<std::size_t, 3> counts{};
  for (const auto label : y) ++counts[label_index(label)];
  for (std::size_t k = 0; k < 3; ++k) {
    if (counts[k] < 2) {
      throw DataError("class " + std::string(label_name(kEventLabels[k])) + " has " +
                      std::to_string(counts[k]) + " training samples, need at least 2");
    }
  }
  for (const auto& v : x) {
    if (!v.allFinite()) throw DataError("non-finite training feature");
  }
  const double n = static_cast<double>(x.size());

  LdaModel model;
  Vec3 mean = Vec3::Zero();
  for (const auto& v : x) mean += v;
  mean /= n;
  Vec3 var = Vec3::Zero();
  for (const auto& v : x) var += (v - mean).cwiseAbs2();
  var /= n;
  model.standardization.shift = mean;
  for (int j = 0; j < 3; ++j) {
    const double sd = std::sqrt(var[j]);
    model.standardization.scale[j] = sd > 0.0 ? sd : 1.0;
  }

  std::array<Vec3, 3> sums;
  sums.fill(Vec3::Zero());
  std::vector<Vec3> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    u[i] = model.standardization.apply(x[i]);
    sums[label_index(y[i])] += u[i];
  }
  for (std::size_t k = 0; k < 3; ++k) {
    model.class_means[k] = sums[k] / static_cast<double>(counts[k]);
    model.log_priors[k] = std::log(static_cast<double>(counts[k]) / n);
  }

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Vec3 d = u[i] - model.class_means[label_index(y[i])];
    cov += d * d.transpose();
  }
  cov /= n;
  cov += (1e-8 * cov.trace() / 3.0) * Eigen::Matrix3d::Identity();

  const Eigen::LLT<Eigen::Matrix3d> llt(cov);
  if (llt.info() != Eigen::Success || !(cov.trace() > 0.0)) {
    throw NumericError("pooled covariance is singular after regularization");
  }
  model.pooled_covariance_inverse = llt.solve(Eigen::Matrix3d::Identity());
  model.pooled_covariance_inverse =
      0.5 * (model.pooled_covariance_inverse + model.pooled_covariance_inverse.transpose()).eval();
  return model;
}

LdaModel lda_fit(const std::vector<features::FeatureVector>& features, FeatureMap map) {
  std::vector<Vec3> x;
  std::vector<EventLabel> y;
  for (const auto& f : features) {
    if (!f.label) throw DataError("feature vector '" + f.epoch_id + "' has no label");
    x.push_back(map_features(f.theta, map));
    y.push_back(*f.label);
  }
  return lda_fit(x, y);
}

Prediction lda_predict(const LdaModel& model, const Vec3& x) {
  if (!x.allFinite()) throw DataError("cannot classify non-finite features");
  const Vec3 u = model.standardization.apply(x);
  Prediction out{model.class_labels[0], {}};
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < 3; ++k) {
    const Vec3 w = model.pooled_covariance_inverse * model.class_means[k];
    out.scores[k] = u.dot(w) - 0.5 * model.class_means[k].dot(w) + model.log_priors[k];
    if (out.scores[k] > best) {
      best = out.scores[k];
      out.label = model.class_labels[k];
    }
  }
  return out;
}

}  // namespace musup::classify
