// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>
#include <vector>

#include "aerofl/datagen.hpp"
#include "aerofl/protocol.hpp"

namespace aerofl {

// Thrown for anything wrong with a configuration: missing file, parse
// error, unknown key or invariant violation. The message carries the detail.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ClusterSpec {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
  double weight = 1.0;
};

struct EnvironmentConfig {
  RoiConfig roi;
  bool explicit_clusters = false;
  std::vector<ClusterSpec> clusters;  // used when explicit_clusters
  int cluster_count = 10;
  double radius_min = 40.0;   // per-axis std-dev range for generated clusters
  double radius_max = 80.0;
  double placement_margin = 0.12;  // keep means this fraction away from edges
  int latent_dim = 4;
  int feature_dim = 16;
  double separation = 2.0;
  double feature_sigma = 1.0;
  int n_max_train = 420;
  int n_max_test = 80;
  int init_scale_train = 512;
  int init_scale_test = 128;
};

struct TrajectoryConfig {
  double zeta = 0.8;
  double d_min = 5.0;
  int visit_cap = 2;
  int max_iters = 10;
  double precision = 1e-4;
  double eps_tol = 1e-6;
  int anchor_variants = 2;  // deterministic SCA starts tried per vehicle
};

struct ExperimentConfig {
  int schema_version = 1;
  EnvironmentConfig environment;
  int fleet = 10;
  TrajectoryConfig trajectory;
  SgdConfig sgd;
  int hidden = 32;
  CompressionConfig compression;
  std::vector<Variant> variants;
  int rounds = 100;
  std::uint64_t master_seed = 42;
  int replications = 1;
  std::string output_dir;

  void validate() const;  // throws ConfigError
};

// Built-in presets: "paper" carries the reference simulation parameters,
// "desk" a small configuration suitable for CI.
ExperimentConfig config_from_preset(const std::string& preset);

// Preset defaults overlaid with the JSON file at `path` (recursive merge,
// unknown keys rejected). An empty path or whitespace-only file keeps the
// preset untouched.
ExperimentConfig load_config(const std::string& path,
                             const std::string& preset = "paper");

// Canonical JSON text; load(save(c)) == c.
std::string save_config(const ExperimentConfig& config);

std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace aerofl
