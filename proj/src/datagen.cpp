// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#include "aerofl/datagen.hpp"

#include <cmath>
#include <stdexcept>

namespace aerofl {

namespace {

// Counts come out of a ceiling applied to products of reals; nudge by a hair
// so values sitting on an integer are not bumped up by 1-ulp libm noise.
int ceil_count(double x) {
  double c = std::ceil(x - 1e-9);
  return c <= 0.0 ? 0 : static_cast<int>(c);
}

}  // namespace

void RoiConfig::validate() const {
  if (width <= 0.0 || height <= 0.0)
    throw std::invalid_argument("roi: width and height must be positive");
  if (acv_altitude <= 0.0)
    throw std::invalid_argument("roi: acv_altitude must be positive");
  if (!(fov > 0.0 && fov < M_PI / 2))
    throw std::invalid_argument("roi: fov must lie in (0, pi/2)");
  if (!contains(gbs_position))
    throw std::invalid_argument("roi: gbs_position must lie inside the region");
}

void SpatialField::validate(const RoiConfig& roi) const {
  if (clusters.empty())
    throw std::invalid_argument("field: at least one cluster required");
  double total = 0.0;
  for (const auto& c : clusters) {
    if (c.weight < 0.0 || c.weight > 1.0)
      throw std::invalid_argument("field: mixture weight outside [0,1]");
    total += c.weight;
    if (std::abs(c.covariance(0, 1) - c.covariance(1, 0)) > 1e-12)
      throw std::invalid_argument("field: covariance not symmetric");
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c.covariance);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("field: covariance not positive definite");
    if (!roi.contains(c.mean))
      throw std::invalid_argument("field: cluster mean outside the region");
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("field: mixture weights must sum to 1");
}

Eigen::VectorXd temporal_basis(int t, int horizon) {
  const double u = static_cast<double>(t) / static_cast<double>(horizon);
  Eigen::VectorXd z(4);
  z << std::sin(2.0 * M_PI * u), std::cos(5.0 * M_PI * u),
      std::sin(5.0 * M_PI * u), std::cos(2.0 * M_PI * u);
  return z;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - m).exp();
  return e / e.sum();
}

Eigen::VectorXd class_distribution(const TemporalDistribution& temporal, int t) {
  return softmax(temporal.mapping * temporal_basis(t, temporal.horizon));
}

Eigen::MatrixXd class_distribution_table(const TemporalDistribution& temporal,
                                         int rounds) {
  Eigen::MatrixXd table(rounds, temporal.classes());
  for (int t = 0; t < rounds; ++t)
    table.row(t) = class_distribution(temporal, t).transpose();
  return table;
}

double gmm_density(const Eigen::Vector2d& q, const SpatialField& field) {
  double density = 0.0;
  for (const auto& c : field.clusters) {
    const double det = c.covariance.determinant();
    if (det <= 0.0)
      throw std::invalid_argument("gmm_density: singular covariance");
    const Eigen::Vector2d d = q - c.mean;
    const double quad = d.dot(c.covariance.inverse() * d);
    density += c.weight * std::exp(-0.5 * quad) / (2.0 * M_PI * std::sqrt(det));
  }
  return density;
}

double footprint_area(double altitude, double fov) {
  if (altitude < 0.0)
    throw std::invalid_argument("footprint_area: negative altitude");
  if (!(fov > 0.0 && fov < M_PI / 2))
    throw std::invalid_argument("footprint_area: fov must lie in (0, pi/2)");
  const double side = 2.0 * altitude * std::tan(fov);
  return side * side;
}

int arrivals(const Eigen::Vector2d& q, const Eigen::VectorXi& indicators,
             const Eigen::VectorXd& psi, int n_max, const SpatialField& field) {
  if (indicators.sum() > 1)
    throw std::invalid_argument("arrivals: at most one active indicator");
  double total = 0.0;
  for (int c = 0; c < field.size(); ++c) {
    if (indicators[c] == 0) continue;
    const double dist = (q - field.clusters[c].mean).norm();
    total += static_cast<double>(n_max) * psi[c] * std::exp(-dist);
  }
  return ceil_count(total);
}

void LocalDataset::append(const Sample& s) {
  if (static_cast<int>(s.features.size()) != feature_dim_)
    throw std::invalid_argument("LocalDataset::append: feature size mismatch");
  features_.insert(features_.end(), s.features.data(),
                   s.features.data() + feature_dim_);
  labels_.push_back(s.label);
  arrival_rounds_.push_back(s.arrival_round);
  ++size_;
}

Sample LocalDataset::sample(int i) const {
  Sample s;
  s.features = features().col(i);
  s.label = labels_[i];
  s.arrival_round = arrival_rounds_[i];
  return s;
}

FeatureModel FeatureModel::make(int classes, int feature_dim, double separation,
                                double sigma) {
  if (classes > feature_dim)
    throw std::invalid_argument("FeatureModel: needs classes <= feature_dim");
  FeatureModel m;
  m.sigma = sigma;
  m.class_means = Eigen::MatrixXd::Zero(feature_dim, classes);
  const double scale = separation / std::sqrt(2.0);
  for (int c = 0; c < classes; ++c) m.class_means(c, c) = scale;
  return m;
}

Eigen::VectorXd synth_features(int label, const FeatureModel& model, Rng& rng) {
  if (label < 0 || label >= model.classes())
    throw std::invalid_argument("synth_features: label out of range");
  Eigen::VectorXd x = model.class_means.col(label);
  for (int i = 0; i < x.size(); ++i) x[i] += model.sigma * rng.normal();
  return x;
}

LocalDataset init_dataset(int owner, const TemporalDistribution& temporal,
                          int size_scale, const FeatureModel& model, Rng& rng) {
  if (size_scale <= 0)
    throw std::invalid_argument("init_dataset: size_scale must be positive");
  const int classes = temporal.classes();
  Eigen::VectorXd mean_psi = Eigen::VectorXd::Zero(classes);
  for (int t = 0; t < temporal.horizon; ++t)
    mean_psi += class_distribution(temporal, t);
  mean_psi /= static_cast<double>(temporal.horizon);

  LocalDataset ds(owner, model.feature_dim());
  for (int c = 0; c < classes; ++c) {
    const int count = ceil_count(mean_psi[c] * size_scale);
    for (int i = 0; i < count; ++i)
      ds.append({synth_features(c, model, rng), c, 0});
  }
  return ds;
}

int sense_and_update(LocalDataset& dataset, int t, const Eigen::Vector2d& q,
                     const Eigen::VectorXi& indicators,
                     const TemporalDistribution& temporal,
                     const SpatialField& field, int n_max,
                     const FeatureModel& model, Rng& rng) {
  if (t < 1)
    throw std::invalid_argument("sense_and_update: t must be >= 1");
  const Eigen::VectorXd psi = class_distribution(temporal, t);
  const int count = arrivals(q, indicators, psi, n_max, field);
  if (count == 0) return 0;

  int assoc = -1;
  for (int c = 0; c < indicators.size(); ++c)
    if (indicators[c] != 0) assoc = c;

  // Label distribution: the associated class dominates, the remainder is
  // spread over the other classes proportionally to psi.
  const int classes = temporal.classes();
  Eigen::VectorXd other = psi;
  other[assoc] = 0.0;
  const double other_mass = other.sum();

  for (int i = 0; i < count; ++i) {
    int label = assoc;
    if (classes > 1 && other_mass > 0.0 && !rng.bernoulli(kLabelPurity)) {
      double u = rng.uniform01() * other_mass;
      for (int c = 0; c < classes; ++c) {
        if (c == assoc) continue;
        u -= other[c];
        label = c;
        if (u <= 0.0) break;
      }
    }
    dataset.append({synth_features(label, model, rng), label, t});
  }
  return count;
}

}  // namespace aerofl
