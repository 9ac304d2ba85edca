// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#include "aerofl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aerofl {

double measure_shift(const ParamVector& w, const LocalDataset& ds,
                     int prev_size, int curr_size) {
  if (prev_size <= 0 || curr_size < prev_size)
    throw std::invalid_argument("measure_shift: bad snapshot sizes");
  if (prev_size == curr_size) return 0.0;
  const Eigen::VectorXd g_prev = prefix_gradient(w, ds, prev_size);
  const Eigen::VectorXd g_curr = prefix_gradient(w, ds, curr_size);
  return (g_prev - g_curr).squaredNorm();
}

double estimate_sigma2(const ParamVector& w, const LocalDataset& ds,
                       int batch_size, int n_draws, Rng& rng) {
  if (n_draws < 1) throw std::invalid_argument("estimate_sigma2: n_draws < 1");
  const Eigen::VectorXd full = dataset_gradient(w, ds);
  const int n = ds.size();
  if (batch_size >= n) return 0.0;  // the batch is the whole dataset
  Eigen::MatrixXd bx(ds.feature_dim(), batch_size);
  Eigen::VectorXi by(batch_size);
  const auto feats = ds.features();
  const auto labs = ds.labels();
  double acc = 0.0;
  for (int d = 0; d < n_draws; ++d) {
    for (int j = 0; j < batch_size; ++j) {
      const int i = rng.uniform_int(n);
      bx.col(j) = feats.col(i);
      by[j] = labs[i];
    }
    acc += (gradient(w, bx, by) - full).squaredNorm();
  }
  return acc / n_draws;
}

double estimate_beta(const ParamVector& w, const LocalDataset& ds,
                     int n_probes, double step, Rng& rng) {
  if (step <= 0.0) throw std::invalid_argument("estimate_beta: step must be positive");
  const Eigen::VectorXd g0 = dataset_gradient(w, ds);
  double beta = 0.0;
  for (int k = 0; k < n_probes; ++k) {
    Eigen::VectorXd v(w.size());
    for (int i = 0; i < w.size(); ++i) v[i] = rng.normal();
    v.normalize();
    ParamVector wp = w;
    wp.values += step * v;
    beta = std::max(beta, (dataset_gradient(wp, ds) - g0).norm() / step);
  }
  return beta;
}

double c_u(double q, double q_prob) {
  return 2.0 + 2.0 * q + (4.0 + q) * q_prob * q_prob - (3.0 * q + 4.0) * q_prob;
}

std::vector<BoundBreakdown> evaluate_bound(const BoundInputs& in,
                                           const std::vector<double>& loss_trace) {
  const int rounds = static_cast<int>(in.eta.size());
  if (static_cast<int>(loss_trace.size()) != rounds + 1)
    throw std::invalid_argument("evaluate_bound: loss trace must have T+1 entries");
  const int u_count = static_cast<int>(in.alpha.size());
  std::vector<BoundBreakdown> out(rounds);
  const double beta = in.beta;
  const double kappa = in.kappa;
  for (int t = 0; t < rounds; ++t) {
    BoundBreakdown& b = out[t];
    const double eta = in.eta[t];
    const double etl = in.eta_tilde[t];

    b.loss_descent_term = 2.0 * (loss_trace[t] - loss_trace[t + 1]) / (eta * kappa);

    double mix = 0.0;
    for (int u = 0; u < u_count; ++u)
      mix += in.alpha[u] * in.alpha[u] * c_u(in.q, in.q_prob[t][u]);
    b.sg_quantization_term =
        beta * in.sigma2 * (kappa * eta * mix + 2.0 * beta * kappa * etl * etl);

    b.shift_term = 16.0 * beta * beta * kappa * kappa * etl * etl *
                   in.alpha.dot(in.phi[t]);
    b.dissimilarity_term = 8.0 * in.rho2 * beta * beta * kappa * kappa * etl *
                           etl * in.alpha.dot(in.epsilon[t]);
    double prune = 0.0;
    for (int u = 0; u < u_count; ++u)
      prune += in.alpha[u] * in.delta[t][u] * in.w_norm_sq[t];
    b.pruning_term = 2.0 * beta * beta * prune;

    b.total = b.loss_descent_term + b.sg_quantization_term + b.shift_term +
              b.dissimilarity_term + b.pruning_term;
  }
  return out;
}

BoundBreakdown time_average(const std::vector<BoundBreakdown>& rounds) {
  BoundBreakdown avg;
  if (rounds.empty()) return avg;
  for (const auto& b : rounds) {
    avg.loss_descent_term += b.loss_descent_term;
    avg.sg_quantization_term += b.sg_quantization_term;
    avg.shift_term += b.shift_term;
    avg.dissimilarity_term += b.dissimilarity_term;
    avg.pruning_term += b.pruning_term;
    avg.total += b.total;
  }
  const double n = static_cast<double>(rounds.size());
  avg.loss_descent_term /= n;
  avg.sg_quantization_term /= n;
  avg.shift_term /= n;
  avg.dissimilarity_term /= n;
  avg.pruning_term /= n;
  avg.total /= n;
  return avg;
}

bool LrGuard::all_satisfied() const {
  return std::all_of(satisfied.begin(), satisfied.end(), [](bool b) { return b; });
}

LrGuard learning_rate_guard(double beta, int kappa, double q, double rho1,
                            const SgdConfig& sgd, int rounds) {
  if (beta <= 0.0) throw std::invalid_argument("learning_rate_guard: beta must be positive");
  LrGuard guard;
  guard.eta_max = 1.0 / (beta * kappa * (2.0 + q));
  const double a = 1.0 / (2.0 * std::sqrt(2.0) * beta * kappa);
  const double b = 1.0 / (2.0 * std::sqrt(2.0 * rho1) * beta * kappa);
  guard.eta_tilde_max = std::min(a, b);
  guard.satisfied.resize(rounds);
  for (int t = 0; t < rounds; ++t)
    guard.satisfied[t] = sgd.global_lr.at(t) <= guard.eta_max &&
                         sgd.local_lr.at(t) < guard.eta_tilde_max;
  return guard;
}

CdfTable overhead_cdf(std::vector<std::uint64_t> bit_counts) {
  if (bit_counts.empty())
    throw std::invalid_argument("overhead_cdf: empty sample set");
  std::sort(bit_counts.begin(), bit_counts.end());
  CdfTable table;
  const double n = static_cast<double>(bit_counts.size());
  for (std::size_t i = 0; i < bit_counts.size(); ++i) {
    if (!table.values.empty() && table.values.back() == bit_counts[i]) {
      table.cum_prob.back() = (i + 1) / n;
    } else {
      table.values.push_back(bit_counts[i]);
      table.cum_prob.push_back((i + 1) / n);
    }
  }
  return table;
}

double compute_overhead(Variant variant, double delta, int kappa, int rho,
                        double unit_cost) {
  if (unit_cost <= 0.0)
    throw std::invalid_argument("compute_overhead: unit cost must be positive");
  switch (variant) {
    case Variant::kAflPrune:
    case Variant::kTwoCeoAfl:
      return rho * unit_cost + kappa * unit_cost * (1.0 - delta);
    case Variant::kCentralizedSgd:
    case Variant::kAfl:
    case Variant::kAflQuant:
      return kappa * unit_cost;
  }
  return kappa * unit_cost;
}

double quantizer_variance_bound(int p, int s) {
  const double dp = p;
  const double ds = s;
  return std::min(dp / (ds * ds), std::sqrt(dp) / ds);
}

}  // namespace aerofl
