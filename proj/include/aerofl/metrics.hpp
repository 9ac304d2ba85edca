// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aerofl/learner.hpp"

namespace aerofl {

// Constants and per-round traces feeding the convergence-bound evaluator.
// Vectors indexed [t][u] hold per-round, per-vehicle values.
struct BoundInputs {
  double beta = 1.0;    // smoothness constant
  double sigma2 = 0.0;  // stochastic-gradient variance
  double q = 0.0;       // quantizer variance constant
  double rho1 = 1.0;
  double rho2 = 1.0;
  int kappa = 5;
  Eigen::VectorXd alpha;                     // per-vehicle weights
  std::vector<double> eta;                   // global lr per round
  std::vector<double> eta_tilde;             // local lr per round
  std::vector<Eigen::VectorXd> phi;          // shift measure per round
  std::vector<Eigen::VectorXd> epsilon;      // dissimilarity per round
  std::vector<Eigen::VectorXd> delta;        // prune fraction per round
  std::vector<Eigen::VectorXd> q_prob;       // raw-offload probability
  std::vector<double> w_norm_sq;             // ||w^t||^2 per round
};

struct BoundBreakdown {
  double loss_descent_term = 0.0;
  double sg_quantization_term = 0.0;
  double shift_term = 0.0;
  double dissimilarity_term = 0.0;
  double pruning_term = 0.0;
  double total = 0.0;
};

// Local data distribution shift: squared norm of the full-batch gradient
// difference between the previous and current dataset snapshots, evaluated
// at the current global model.
double measure_shift(const ParamVector& w, const LocalDataset& ds,
                     int prev_size, int curr_size);

// Mini-batch gradient variance around the full-batch gradient.
double estimate_sigma2(const ParamVector& w, const LocalDataset& ds,
                       int batch_size, int n_draws, Rng& rng);

// Empirical smoothness probe: max gradient-difference ratio over random
// unit directions. A lower estimate of the true Lipschitz constant.
double estimate_beta(const ParamVector& w, const LocalDataset& ds,
                     int n_probes, double step, Rng& rng);

// Quantization mixing coefficient 2 + 2q + (4+q) qp^2 - (3q+4) qp.
double c_u(double q, double q_prob);

// Per-round bound evaluation; loss_trace must hold T+1 expected losses.
std::vector<BoundBreakdown> evaluate_bound(const BoundInputs& inputs,
                                           const std::vector<double>& loss_trace);
BoundBreakdown time_average(const std::vector<BoundBreakdown>& rounds);

// Admissible learning-rate ceilings from the convergence theorem and
// per-round satisfaction flags for a configured schedule.
struct LrGuard {
  double eta_max = 0.0;
  double eta_tilde_max = 0.0;
  std::vector<bool> satisfied;
  bool all_satisfied() const;
};
LrGuard learning_rate_guard(double beta, int kappa, double q, double rho1,
                            const SgdConfig& sgd, int rounds);

// Empirical CDF of per-payload bit counts: sorted (value, cumulative prob).
struct CdfTable {
  std::vector<std::uint64_t> values;
  std::vector<double> cum_prob;
};
CdfTable overhead_cdf(std::vector<std::uint64_t> bit_counts);

// Local-training cost per round in units of one dense local round. Variant
// names follow the experiment protocol.
enum class Variant { kCentralizedSgd, kAfl, kAflPrune, kAflQuant, kTwoCeoAfl };

double compute_overhead(Variant variant, double delta, int kappa, int rho,
                        double unit_cost);

// Theoretical variance constant of the stochastic quantizer.
double quantizer_variance_bound(int p, int s);

}  // namespace aerofl
