// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aerofl/rng.hpp"

namespace aerofl {

// Rectangular region of interest, centered on the origin where the ground
// base station sits.
struct RoiConfig {
  double width = 1000.0;   // meters
  double height = 1000.0;  // meters
  Eigen::Vector2d gbs_position{0.0, 0.0};
  double acv_altitude = 100.0;  // meters
  double fov = 0.5235987755982988;  // radians (pi/6)

  bool contains(const Eigen::Vector2d& q) const {
    return std::abs(q.x()) <= 0.5 * width && std::abs(q.y()) <= 0.5 * height;
  }
  double diagonal() const { return std::hypot(width, height); }
  void validate() const;  // throws std::invalid_argument
};

struct GaussianCluster {
  Eigen::Vector2d mean;        // meters
  Eigen::Matrix2d covariance;  // meters^2, SPD
  double weight = 1.0;         // mixture weight
};

// Per-vehicle spatial mixture over the region of interest.
struct SpatialField {
  std::vector<GaussianCluster> clusters;

  int size() const { return static_cast<int>(clusters.size()); }
  void validate(const RoiConfig& roi) const;
};

// Time-varying class distribution: softmax of mapping * basis(t). The basis
// period is pinned to the training horizon.
struct TemporalDistribution {
  Eigen::MatrixXd mapping;  // C x K
  int horizon = 1;

  int classes() const { return static_cast<int>(mapping.rows()); }
  int latent_dim() const { return static_cast<int>(mapping.cols()); }
};

// Four-component sinusoidal basis evaluated at round t of a horizon-T run.
Eigen::VectorXd temporal_basis(int t, int horizon);

// Numerically stabilized softmax (max logit subtracted before exp).
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

Eigen::VectorXd class_distribution(const TemporalDistribution& temporal, int t);

// Full T x C table of class distributions for rounds 0..T-1.
Eigen::MatrixXd class_distribution_table(const TemporalDistribution& temporal,
                                         int rounds);

// Mixture density at a point (standard bivariate normal components).
double gmm_density(const Eigen::Vector2d& q, const SpatialField& field);

// Ground area covered by the onboard camera, (2 h tan(theta))^2.
double footprint_area(double altitude, double fov);

// Number of new samples sensed at position q given the cluster-association
// indicators and the round's class distribution.
int arrivals(const Eigen::Vector2d& q, const Eigen::VectorXi& indicators,
             const Eigen::VectorXd& psi, int n_max, const SpatialField& field);

struct Sample {
  Eigen::VectorXd features;
  int label = 0;
  int arrival_round = 0;
};

// Append-only per-vehicle dataset with columnar storage so training code can
// map feature blocks without copies. Prefix views give the dataset as it
// stood at any earlier round.
class LocalDataset {
 public:
  LocalDataset() = default;
  LocalDataset(int owner, int feature_dim)
      : owner_(owner), feature_dim_(feature_dim) {}

  void append(const Sample& s);
  int size() const { return size_; }
  int owner() const { return owner_; }
  int feature_dim() const { return feature_dim_; }

  Sample sample(int i) const;

  Eigen::Map<const Eigen::MatrixXd> features() const {
    return {features_.data(), feature_dim_, size_};
  }
  Eigen::Map<const Eigen::VectorXi> labels() const {
    return {labels_.data(), size_};
  }
  Eigen::Map<const Eigen::VectorXi> arrival_rounds() const {
    return {arrival_rounds_.data(), size_};
  }

  Eigen::Map<const Eigen::MatrixXd> feature_prefix(int n) const {
    return {features_.data(), feature_dim_, n};
  }
  Eigen::Map<const Eigen::VectorXi> label_prefix(int n) const {
    return {labels_.data(), n};
  }

 private:
  int owner_ = 0;
  int feature_dim_ = 0;
  int size_ = 0;
  std::vector<double> features_;  // column-major F x size
  std::vector<int> labels_;
  std::vector<int> arrival_rounds_;
};

// Class-conditional isotropic Gaussian feature synthesizer. Class means sit
// on scaled one-hot directions, so pairwise separation is uniform.
struct FeatureModel {
  Eigen::MatrixXd class_means;  // F x C
  double sigma = 1.0;

  int feature_dim() const { return static_cast<int>(class_means.rows()); }
  int classes() const { return static_cast<int>(class_means.cols()); }

  static FeatureModel make(int classes, int feature_dim = 16,
                           double separation = 2.0, double sigma = 1.0);
};

Eigen::VectorXd synth_features(int label, const FeatureModel& model, Rng& rng);

// Initial dataset: ceil(mean_t psi_c * size_scale) samples per class, all
// stamped with arrival round 0.
LocalDataset init_dataset(int owner, const TemporalDistribution& temporal,
                          int size_scale, const FeatureModel& model, Rng& rng);

// Senses new samples at position q for round t and appends them; returns the
// number appended. Labels follow the associated cluster with probability
// kLabelPurity, otherwise a psi-weighted other class.
inline constexpr double kLabelPurity = 0.9;
int sense_and_update(LocalDataset& dataset, int t, const Eigen::Vector2d& q,
                     const Eigen::VectorXi& indicators,
                     const TemporalDistribution& temporal,
                     const SpatialField& field, int n_max,
                     const FeatureModel& model, Rng& rng);

}  // namespace aerofl
