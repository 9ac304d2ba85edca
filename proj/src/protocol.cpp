// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#include "aerofl/protocol.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace aerofl {

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const int workers = std::min(threads, n);
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

Eigen::VectorXd pooled_full_gradient(const ParamVector& w,
                                     const Environment& env,
                                     const std::vector<int>& sizes,
                                     const std::vector<double>& alpha,
                                     std::vector<Eigen::VectorXd>* per_acv) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(w.size());
  if (per_acv) per_acv->assign(env.acv_count(), Eigen::VectorXd());
  for (int u = 0; u < env.acv_count(); ++u) {
    if (sizes[u] <= 0) continue;
    Eigen::VectorXd gu = prefix_gradient(w, env.acvs[u].train, sizes[u]);
    g += alpha[u] * gu;
    if (per_acv) (*per_acv)[u] = std::move(gu);
  }
  return g;
}

}  // namespace

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kCentralizedSgd: return "SGD";
    case Variant::kAfl: return "AFL";
    case Variant::kAflPrune: return "AFL-Prune";
    case Variant::kAflQuant: return "AFL-Quant";
    case Variant::kTwoCeoAfl: return "2CEOAFL";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "SGD") return Variant::kCentralizedSgd;
  if (name == "AFL") return Variant::kAfl;
  if (name == "AFL-Prune") return Variant::kAflPrune;
  if (name == "AFL-Quant") return Variant::kAflQuant;
  if (name == "2CEOAFL") return Variant::kTwoCeoAfl;
  throw std::invalid_argument("unknown variant name: " + name);
}

RoundPlan make_round_plan(Variant variant, int t, const ProtocolConfig& cfg,
                          const Eigen::MatrixXd& delta_schedule, int acv_count) {
  RoundPlan plan;
  plan.t = t;
  plan.eta = cfg.sgd.global_lr.at(t);
  plan.eta_tilde = cfg.sgd.local_lr.at(t);
  plan.kappa = cfg.sgd.kappa;
  plan.rho = cfg.sgd.rho;
  plan.batch_size = cfg.sgd.batch_size;
  plan.batches_per_round = cfg.sgd.batches_per_round;
  plan.s = cfg.compression.s;
  plan.delta_th = cfg.compression.delta_th;
  plan.acvs.resize(acv_count);
  for (int u = 0; u < acv_count; ++u) {
    auto& per = plan.acvs[u];
    per.alpha = 1.0 / acv_count;
    const double sched = delta_schedule(t, u);
    switch (variant) {
      case Variant::kCentralizedSgd:
      case Variant::kAfl:
        per.delta_target = 0.0;
        per.q_prob = 1.0;
        break;
      case Variant::kAflPrune:
        per.delta_target = sched;
        per.q_prob = 1.0;
        break;
      case Variant::kAflQuant:
        per.delta_target = 0.0;
        per.q_prob = 0.0;
        break;
      case Variant::kTwoCeoAfl:
        per.delta_target = sched;
        per.q_prob = cfg.compression.q_equals_delta ? sched : cfg.compression.q_fixed;
        break;
    }
  }
  return plan;
}

LocalOutcome local_round_2ceoafl(const ParamVector& w_global,
                                 const LocalDataset& ds, int prefix_size,
                                 const RoundPlan& plan, int acv, Rng& warmup_rng,
                                 Rng& local_rng, Rng& offload_rng) {
  if (prefix_size <= 0)
    throw std::invalid_argument("local_round: empty dataset");
  const auto& per = plan.acvs[acv];
  LocalOutcome out;

  // Dense warm-up only when a mask actually has to be learned.
  Mask mask = Mask::ones(w_global.size());
  double warmup_rounds = 0.0;
  if (per.delta_target > 0.0) {
    const ParamVector warmed = masked_sgd_steps(
        w_global, mask, plan.rho * plan.batches_per_round, plan.eta_tilde, ds,
        prefix_size, plan.batch_size, warmup_rng);
    const PruneResult pruned =
        lottery_prune(w_global, warmed, per.delta_target, plan.delta_th);
    mask = pruned.mask;
    warmup_rounds = plan.rho;
  }

  ParamVector ticket = w_global;
  ticket.values.array() *= mask.bits.array();

  const ParamVector trained = masked_sgd_steps(
      ticket, mask, plan.kappa * plan.batches_per_round, plan.eta_tilde, ds,
      prefix_size, plan.batch_size, local_rng, &out.stats.step_losses);

  const Eigen::VectorXd d = model_difference(ticket, trained, plan.eta_tilde);
  out.payload = offload(d, mask, per.q_prob, plan.s, offload_rng);
  out.stats.delta = mask.prune_fraction();
  out.stats.bits = out.payload.bit_count;
  out.stats.compute_units =
      warmup_rounds + plan.kappa * (1.0 - out.stats.delta);
  out.mask = std::move(mask);
  return out;
}

ParamVector aggregate(const ParamVector& w_global,
                      const std::vector<OffloadPayload>& payloads,
                      const std::vector<double>& alpha, double eta) {
  if (payloads.size() != alpha.size())
    throw std::invalid_argument("aggregate: payload/alpha size mismatch");
  Eigen::VectorXd update = Eigen::VectorXd::Zero(w_global.size());
  for (std::size_t u = 0; u < payloads.size(); ++u) {
    const Eigen::VectorXd d = decode_payload(payloads[u]);
    if (d.size() != w_global.size())
      throw std::runtime_error("aggregate: corrupt payload length");
    update += alpha[u] * d;
  }
  ParamVector w = w_global;
  w.values -= eta * update;
  if (!w.values.allFinite())
    throw std::runtime_error("aggregate: non-finite global model");
  return w;
}

double global_loss(const ParamVector& w, const Environment& env,
                   const std::vector<int>& prefix_sizes,
                   const std::vector<double>& alpha) {
  double loss = 0.0;
  for (int u = 0; u < env.acv_count(); ++u) {
    if (prefix_sizes[u] <= 0) continue;
    loss += alpha[u] * prefix_loss(w, env.acvs[u].train, prefix_sizes[u]);
  }
  return loss;
}

double test_accuracy(const ParamVector& w, const Environment& env,
                     const std::vector<int>& test_prefix_sizes) {
  std::int64_t correct = 0;
  std::int64_t total = 0;
  for (int u = 0; u < env.acv_count(); ++u) {
    const int n = test_prefix_sizes[u];
    if (n <= 0) continue;
    const auto x = env.acvs[u].test.feature_prefix(n);
    const auto y = env.acvs[u].test.label_prefix(n);
    const Eigen::MatrixXd a1 =
        ((w.w1() * x).colwise() + w.b1()).array().tanh().matrix();
    const Eigen::MatrixXd logits = (w.w2() * a1).colwise() + w.b2();
    for (int j = 0; j < n; ++j) {
      int arg = 0;
      logits.col(j).maxCoeff(&arg);
      correct += arg == y[j] ? 1 : 0;
    }
    total += n;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / total;
}

ExperimentResult run_experiment(Variant variant, const Environment& env,
                                const ProtocolConfig& cfg,
                                std::uint64_t run_seed,
                                std::uint64_t seed_index, int threads) {
  cfg.sgd.validate();
  const int u_count = env.acv_count();
  const int rounds = env.rounds;

  // Pruning-ratio schedule, shared by every variant under this run seed.
  Eigen::MatrixXd delta_schedule(rounds, u_count);
  for (int t = 0; t < rounds; ++t)
    for (int u = 0; u < u_count; ++u) {
      Rng rng(substream_seed(run_seed, "delta", u, t));
      delta_schedule(t, u) =
          rng.uniform(cfg.compression.delta_min, cfg.compression.delta_max);
    }

  Rng init_rng(substream_seed(run_seed, "init"));
  const int feature_dim = env.feature_model.feature_dim();
  const int classes = env.feature_model.classes();
  ParamVector w =
      ParamVector::random_init(feature_dim, cfg.hidden, classes, init_rng);

  // Pooled dataset for the centralized baseline, grown round by round.
  LocalDataset pooled(-1, feature_dim);
  std::vector<int> pooled_consumed(u_count, 0);

  ExperimentResult result;
  result.loss_trace.reserve(rounds + 1);
  if (rounds == 0) {
    result.final_model = w;
    return result;
  }

  std::vector<int> train_sizes(u_count), test_sizes(u_count);
  for (int t = 0; t < rounds; ++t) {
    for (int u = 0; u < u_count; ++u) {
      train_sizes[u] = env.acvs[u].train_size_at[t];
      test_sizes[u] = env.acvs[u].test_size_at[t];
    }

    // Participation weights; vehicles with empty datasets sit the round out.
    std::vector<double> alpha(u_count, 0.0);
    int active = 0;
    for (int u = 0; u < u_count; ++u) active += train_sizes[u] > 0 ? 1 : 0;
    if (active == 0) throw std::runtime_error("run_experiment: no active vehicle");
    for (int u = 0; u < u_count; ++u)
      if (train_sizes[u] > 0) alpha[u] = 1.0 / active;

    RoundMetrics m;
    m.variant = variant;
    m.seed = seed_index;
    m.round = t;
    m.acv_bits.assign(u_count, 0);
    m.acv_delta.assign(u_count, 0.0);
    m.acv_phi.assign(u_count, 0.0);
    m.acv_qprob.assign(u_count, 0.0);
    m.acv_epsilon.assign(u_count, 0.0);
    m.w_norm_sq = w.values.squaredNorm();

    m.global_loss = global_loss(w, env, train_sizes, alpha);
    result.loss_trace.push_back(m.global_loss);

    // Distribution-shift and dissimilarity measurements at the round start.
    std::vector<Eigen::VectorXd> full_grads;
    const Eigen::VectorXd pooled_grad =
        pooled_full_gradient(w, env, train_sizes, alpha, &full_grads);
    for (int u = 0; u < u_count; ++u) {
      if (train_sizes[u] <= 0) continue;
      const int prev = t == 0 ? train_sizes[u] : env.acvs[u].train_size_at[t - 1];
      m.acv_phi[u] = t == 0 ? 0.0
                            : measure_shift(w, env.acvs[u].train, prev,
                                            train_sizes[u]);
      m.acv_epsilon[u] = (full_grads[u] - pooled_grad).squaredNorm();
    }

    const RoundPlan plan =
        make_round_plan(variant, t, cfg, delta_schedule, u_count);

    if (variant == Variant::kCentralizedSgd) {
      for (int u = 0; u < u_count; ++u) {
        const int upto = train_sizes[u];
        for (int i = pooled_consumed[u]; i < upto; ++i)
          pooled.append(env.acvs[u].train.sample(i));
        pooled_consumed[u] = upto;
      }
      Rng central_rng(substream_seed(run_seed, "central", t));
      const Mask full = Mask::ones(w.size());
      // The Genie gets the fleet's total step budget on the pooled dataset.
      const int steps = u_count * cfg.sgd.kappa * cfg.sgd.batches_per_round;
      w = masked_sgd_steps(w, full, steps, plan.eta_tilde, pooled,
                           pooled.size(), cfg.sgd.batch_size, central_rng);
      m.compute_units = static_cast<double>(u_count) * cfg.sgd.kappa;
      m.masked_grad_sq = pooled_grad.squaredNorm();
    } else {
      std::vector<LocalOutcome> outcomes(u_count);
      std::vector<char> present(u_count, 0);
      parallel_for(u_count, threads, [&](int u) {
        if (train_sizes[u] <= 0) return;
        Rng warmup(substream_seed(run_seed, "warmup", u, t));
        Rng local(substream_seed(run_seed, "local", u, t));
        Rng off(substream_seed(run_seed, "offload", u, t));
        outcomes[u] = local_round_2ceoafl(w, env.acvs[u].train, train_sizes[u],
                                          plan, u, warmup, local, off);
        present[u] = 1;
      });

      std::vector<OffloadPayload> payloads;
      std::vector<double> agg_alpha;
      Eigen::VectorXd masked_grad = Eigen::VectorXd::Zero(w.size());
      for (int u = 0; u < u_count; ++u) {
        if (!present[u]) continue;
        payloads.push_back(outcomes[u].payload);
        agg_alpha.push_back(alpha[u]);
        m.acv_bits[u] = outcomes[u].stats.bits;
        m.total_bits += outcomes[u].stats.bits;
        m.acv_delta[u] = outcomes[u].stats.delta;
        m.acv_qprob[u] = plan.acvs[u].q_prob;
        m.compute_units += outcomes[u].stats.compute_units;
        masked_grad +=
            alpha[u] *
            (full_grads[u].array() * outcomes[u].mask.bits.array()).matrix();
      }
      m.masked_grad_sq = masked_grad.squaredNorm();
      w = aggregate(w, payloads, agg_alpha, plan.eta);
    }

    m.test_accuracy = test_accuracy(w, env, test_sizes);
    result.rounds.push_back(std::move(m));
  }

  // Closing entry of the loss trace: final model on the final datasets.
  std::vector<double> alpha(u_count, 0.0);
  int active = 0;
  for (int u = 0; u < u_count; ++u) active += train_sizes[u] > 0 ? 1 : 0;
  for (int u = 0; u < u_count; ++u)
    if (train_sizes[u] > 0) alpha[u] = 1.0 / active;
  result.loss_trace.push_back(global_loss(w, env, train_sizes, alpha));
  result.final_model = w;
  return result;
}

}  // namespace aerofl
