// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aerofl/compression.hpp"
#include "aerofl/datagen.hpp"
#include "aerofl/metrics.hpp"
#include "aerofl/trajectory.hpp"

namespace aerofl {

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// Prepared per-vehicle environment: trajectory plus fully pre-sensed train
// and test datasets with per-round prefix sizes. Sensing draws come from
// variant-independent substreams, so every algorithm variant sees the same
// data by construction.
struct AcvEnvironment {
  SpatialField field;
  TemporalDistribution temporal;
  Trajectory trajectory;
  LocalDataset train;
  std::vector<int> train_size_at;  // dataset size visible at round t
  LocalDataset test;
  std::vector<int> test_size_at;
};

struct Environment {
  RoiConfig roi;
  FeatureModel feature_model;
  std::vector<AcvEnvironment> acvs;
  int rounds = 0;
  int acv_count() const { return static_cast<int>(acvs.size()); }
};

// Compression/offload policy shared by the variants.
struct CompressionConfig {
  int s = 3;
  double delta_min = 0.05;
  double delta_max = 0.7;
  double delta_th = 0.7;
  bool q_equals_delta = true;  // q_u^t = delta_u^t; otherwise q_fixed
  double q_fixed = 1.0;
};

struct ProtocolConfig {
  SgdConfig sgd;
  CompressionConfig compression;
  int hidden = 32;
};

// Resolved per-round plan: learning rates plus per-vehicle targets.
struct RoundPlan {
  int t = 0;
  double eta = 0.1;
  double eta_tilde = 0.1;
  int kappa = 5;
  int rho = 1;
  int batch_size = 64;
  int batches_per_round = 1;
  int s = 3;
  double delta_th = 0.7;
  struct PerAcv {
    double delta_target = 0.0;
    double q_prob = 1.0;
    double alpha = 1.0;
  };
  std::vector<PerAcv> acvs;
};

RoundPlan make_round_plan(Variant variant, int t, const ProtocolConfig& cfg,
                          const Eigen::MatrixXd& delta_schedule, int acv_count);

struct LocalStats {
  double delta = 0.0;
  std::uint64_t bits = 0;
  double compute_units = 0.0;  // dense-round units actually spent
  std::vector<double> step_losses;
};

struct LocalOutcome {
  OffloadPayload payload;
  Mask mask;
  LocalStats stats;
};

// One vehicle's local phase: rho dense warm-up rounds, magnitude pruning,
// kappa masked rounds, then the probabilistic offload. The warm-up is
// skipped when the prune target is exactly zero, where the mask is all-ones
// regardless of the warmed model.
LocalOutcome local_round_2ceoafl(const ParamVector& w_global,
                                 const LocalDataset& ds, int prefix_size,
                                 const RoundPlan& plan, int acv, Rng& warmup_rng,
                                 Rng& local_rng, Rng& offload_rng);

// Server update w - eta * sum_u alpha_u * decode(payload_u). Payload order
// is fixed by vehicle index regardless of arrival order.
ParamVector aggregate(const ParamVector& w_global,
                      const std::vector<OffloadPayload>& payloads,
                      const std::vector<double>& alpha, double eta);

double global_loss(const ParamVector& w, const Environment& env,
                   const std::vector<int>& prefix_sizes,
                   const std::vector<double>& alpha);

double test_accuracy(const ParamVector& w, const Environment& env,
                     const std::vector<int>& test_prefix_sizes);

struct RoundMetrics {
  Variant variant = Variant::kAfl;
  std::uint64_t seed = 0;
  int round = 0;
  double test_accuracy = 0.0;
  double global_loss = 0.0;  // f(w^t | D^t) at the round start
  std::uint64_t total_bits = 0;
  double compute_units = 0.0;
  std::vector<std::uint64_t> acv_bits;
  std::vector<double> acv_delta;
  std::vector<double> acv_phi;
  std::vector<double> acv_qprob;
  std::vector<double> acv_epsilon;
  double w_norm_sq = 0.0;
  double masked_grad_sq = 0.0;
};

struct ExperimentResult {
  std::vector<RoundMetrics> rounds;
  std::vector<double> loss_trace;  // length T+1
  ParamVector final_model;
};

// Executes T synchronous global rounds of the chosen variant on a prepared
// environment. All randomness is keyed off run_seed through per-purpose
// substreams; seed_index only labels the metrics rows.
ExperimentResult run_experiment(Variant variant, const Environment& env,
                                const ProtocolConfig& cfg,
                                std::uint64_t run_seed,
                                std::uint64_t seed_index, int threads = 1);

}  // namespace aerofl
