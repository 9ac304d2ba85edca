// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#include "aerofl/protocol.hpp"

#include <cmath>

#include "aerofl/battery.hpp"
#include "doctest.h"

using namespace aerofl;

namespace {

ExperimentConfig tiny_config(int rounds = 6, int fleet = 3, int classes = 3) {
  ExperimentConfig cfg = config_from_preset("desk");
  cfg.rounds = rounds;
  cfg.fleet = fleet;
  cfg.environment.cluster_count = classes;
  cfg.hidden = 8;
  cfg.replications = 1;
  return cfg;
}

}  // namespace

TEST_CASE("round plans encode the variant semantics") {
  ExperimentConfig cfg = tiny_config();
  const ProtocolConfig pcfg = protocol_config(cfg);
  Eigen::MatrixXd sched = Eigen::MatrixXd::Constant(4, 3, 0.4);

  const RoundPlan afl = make_round_plan(Variant::kAfl, 2, pcfg, sched, 3);
  const RoundPlan prune = make_round_plan(Variant::kAflPrune, 2, pcfg, sched, 3);
  const RoundPlan quant = make_round_plan(Variant::kAflQuant, 2, pcfg, sched, 3);
  const RoundPlan ceo = make_round_plan(Variant::kTwoCeoAfl, 2, pcfg, sched, 3);

  for (int u = 0; u < 3; ++u) {
    CHECK(afl.acvs[u].delta_target == 0.0);
    CHECK(afl.acvs[u].q_prob == 1.0);
    CHECK(prune.acvs[u].delta_target == 0.4);
    CHECK(prune.acvs[u].q_prob == 1.0);
    CHECK(quant.acvs[u].delta_target == 0.0);
    CHECK(quant.acvs[u].q_prob == 0.0);
    CHECK(ceo.acvs[u].delta_target == 0.4);
    CHECK(ceo.acvs[u].q_prob == 0.4);  // q = delta rule
    CHECK(ceo.acvs[u].alpha == doctest::Approx(1.0 / 3));
  }
}

TEST_CASE("aggregate applies the weighted decoded update") {
  ParamVector w(2, 2, 2);
  w.values.setConstant(1.0);

  SUBCASE("all-zero payloads leave the model unchanged") {
    OffloadPayload z;
    z.kind = PayloadKind::kRaw;
    z.raw = Eigen::VectorXd::Zero(w.size());
    z.mask = Mask::ones(w.size());
    const ParamVector out = aggregate(w, {z, z}, {0.5, 0.5}, 0.1);
    CHECK(out.values == w.values);
  }

  SUBCASE("single raw payload moves by -eta d") {
    OffloadPayload p;
    p.kind = PayloadKind::kRaw;
    p.raw = Eigen::VectorXd::Constant(w.size(), 2.0);
    p.mask = Mask::ones(w.size());
    const ParamVector out = aggregate(w, {p}, {1.0}, 0.1);
    for (int i = 0; i < w.size(); ++i)
      CHECK(out.values[i] == doctest::Approx(1.0 - 0.2).epsilon(1e-15));
  }

  SUBCASE("two raw payloads combine by alpha") {
    OffloadPayload a, b;
    a.kind = b.kind = PayloadKind::kRaw;
    a.mask = b.mask = Mask::ones(w.size());
    a.raw = Eigen::VectorXd::Constant(w.size(), 1.0);
    b.raw = Eigen::VectorXd::Constant(w.size(), 3.0);
    const ParamVector out = aggregate(w, {a, b}, {0.25, 0.75}, 0.2);
    // update = 0.25*1 + 0.75*3 = 2.5; step = 0.5
    for (int i = 0; i < w.size(); ++i)
      CHECK(std::abs(out.values[i] - 0.5) < 1e-12);
  }

  SUBCASE("aggregation is order-independent given fixed weights") {
    OffloadPayload a, b, c;
    a.kind = b.kind = c.kind = PayloadKind::kRaw;
    a.mask = b.mask = c.mask = Mask::ones(w.size());
    Rng rng(3);
    a.raw.resize(w.size());
    b.raw.resize(w.size());
    c.raw.resize(w.size());
    for (int i = 0; i < w.size(); ++i) {
      a.raw[i] = rng.normal();
      b.raw[i] = rng.normal();
      c.raw[i] = rng.normal();
    }
    // identical weights: any payload order must give a bitwise-equal model
    const ParamVector o1 = aggregate(w, {a, b, c}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.1);
    const ParamVector o2 = aggregate(w, {a, b, c}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.1);
    CHECK(o1.values == o2.values);
  }
}

TEST_CASE("global loss is a convex combination of local losses") {
  ExperimentConfig cfg = tiny_config(4, 2, 3);
  const std::uint64_t seed = replicate_seed(cfg.master_seed, 0);
  const Environment env = build_environment(cfg, seed);
  Rng rng(4);
  const ParamVector w = ParamVector::random_init(
      env.feature_model.feature_dim(), cfg.hidden, env.feature_model.classes(), rng);
  std::vector<int> sizes{env.acvs[0].train_size_at[0], env.acvs[1].train_size_at[0]};

  const double l0 = prefix_loss(w, env.acvs[0].train, sizes[0]);
  const double l1 = prefix_loss(w, env.acvs[1].train, sizes[1]);
  CHECK(global_loss(w, env, sizes, {1.0, 0.0}) == doctest::Approx(l0).epsilon(1e-12));
  CHECK(global_loss(w, env, sizes, {0.5, 0.5}) ==
        doctest::Approx(0.5 * l0 + 0.5 * l1).epsilon(1e-12));
}

TEST_CASE("local round degenerates to plain AFL when delta=0 and q=1") {
  ExperimentConfig cfg = tiny_config(4, 2, 3);
  const std::uint64_t seed = replicate_seed(cfg.master_seed, 0);
  const Environment env = build_environment(cfg, seed);
  const ProtocolConfig pcfg = protocol_config(cfg);
  Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(cfg.rounds, cfg.fleet);
  const RoundPlan plan = make_round_plan(Variant::kAfl, 0, pcfg, zeros, 2);

  Rng rng(5);
  const ParamVector w = ParamVector::random_init(
      env.feature_model.feature_dim(), cfg.hidden, env.feature_model.classes(), rng);

  Rng w1(100), l1(101), o1(102);
  const LocalOutcome out = local_round_2ceoafl(
      w, env.acvs[0].train, env.acvs[0].train_size_at[0], plan, 0, w1, l1, o1);
  CHECK(out.payload.kind == PayloadKind::kRaw);
  CHECK(out.stats.delta == 0.0);
  CHECK(out.mask.zero_count() == 0);
  CHECK(out.stats.compute_units == doctest::Approx(pcfg.sgd.kappa));

  SUBCASE("kappa=0 gives a zero payload") {
    ProtocolConfig zero_cfg = pcfg;
    zero_cfg.sgd.kappa = 1;
    RoundPlan p2 = make_round_plan(Variant::kAfl, 0, zero_cfg, zeros, 2);
    p2.kappa = 0;
    Rng w2(100), l2(101), o2(102);
    const LocalOutcome out2 = local_round_2ceoafl(
        w, env.acvs[0].train, env.acvs[0].train_size_at[0], p2, 0, w2, l2, o2);
    CHECK(decode_payload(out2.payload).norm() == 0.0);
  }

  SUBCASE("fixed seeds reproduce the payload bit for bit") {
    Rng w2(100), l2(101), o2(102);
    const LocalOutcome out2 = local_round_2ceoafl(
        w, env.acvs[0].train, env.acvs[0].train_size_at[0], plan, 0, w2, l2, o2);
    CHECK(out2.payload.kind == out.payload.kind);
    CHECK(out2.payload.raw == out.payload.raw);
    CHECK(encode_payload(out2.payload) == encode_payload(out.payload));
  }
}

TEST_CASE("pruned local rounds spend fewer compute units") {
  ExperimentConfig cfg = tiny_config(4, 2, 3);
  const std::uint64_t seed = replicate_seed(cfg.master_seed, 0);
  const Environment env = build_environment(cfg, seed);
  const ProtocolConfig pcfg = protocol_config(cfg);
  Eigen::MatrixXd sched = Eigen::MatrixXd::Constant(cfg.rounds, cfg.fleet, 0.5);
  const RoundPlan plan = make_round_plan(Variant::kTwoCeoAfl, 0, pcfg, sched, 2);

  Rng rng(6);
  const ParamVector w = ParamVector::random_init(
      env.feature_model.feature_dim(), cfg.hidden, env.feature_model.classes(), rng);
  Rng wu(1), lo(2), of(3);
  const LocalOutcome out = local_round_2ceoafl(
      w, env.acvs[0].train, env.acvs[0].train_size_at[0], plan, 0, wu, lo, of);
  // rho + kappa (1 - delta)
  CHECK(out.stats.compute_units ==
        doctest::Approx(plan.rho + plan.kappa * (1.0 - out.stats.delta)));
  CHECK(out.stats.delta == doctest::Approx(0.5).epsilon(0.01));
  // support of the decoded update stays inside the mask support
  const Eigen::VectorXd d = decode_payload(out.payload);
  for (int i = 0; i < d.size(); ++i)
    if (out.mask.bits[i] == 0.0) CHECK(d[i] == 0.0);
}

TEST_CASE("run_experiment executes and records the synchronous rounds") {
  ExperimentConfig cfg = tiny_config(5, 3, 3);
  const std::uint64_t seed = replicate_seed(cfg.master_seed, 0);
  const Environment env = build_environment(cfg, seed);
  const ProtocolConfig pcfg = protocol_config(cfg);

  SUBCASE("zero rounds produce an empty history") {
    ExperimentConfig cfg0 = tiny_config(0, 2, 3);
    // environments are built for max(rounds, 1); run with rounds=0
    Environment env0 = build_environment(cfg0, seed);
    env0.rounds = 0;
    const ExperimentResult res =
        run_experiment(Variant::kAfl, env0, pcfg, seed, 0);
    CHECK(res.rounds.empty());
  }

  SUBCASE("metrics rows are complete and threads do not change results") {
    const ExperimentResult a =
        run_experiment(Variant::kTwoCeoAfl, env, pcfg, seed, 0, 1);
    const ExperimentResult b =
        run_experiment(Variant::kTwoCeoAfl, env, pcfg, seed, 0, 3);
    REQUIRE(a.rounds.size() == 5);
    REQUIRE(a.loss_trace.size() == 6);
    for (int t = 0; t < 5; ++t) {
      CHECK(a.rounds[t].round == t);
      CHECK(a.rounds[t].total_bits > 0);
      CHECK(a.rounds[t].test_accuracy >= 0.0);
      CHECK(a.rounds[t].test_accuracy <= 1.0);
      CHECK(a.rounds[t].test_accuracy == b.rounds[t].test_accuracy);
      CHECK(a.rounds[t].global_loss == b.rounds[t].global_loss);
      CHECK(a.rounds[t].total_bits == b.rounds[t].total_bits);
      CHECK(a.rounds[t].acv_phi == b.rounds[t].acv_phi);
    }
    CHECK(a.final_model.values == b.final_model.values);
    // phi is zero at the first round by definition
    for (double phi : a.rounds[0].acv_phi) CHECK(phi == 0.0);
  }

  SUBCASE("centralized SGD runs without payloads") {
    const ExperimentResult res =
        run_experiment(Variant::kCentralizedSgd, env, pcfg, seed, 0);
    for (const auto& m : res.rounds) {
      CHECK(m.total_bits == 0);
      CHECK(m.compute_units == doctest::Approx(3.0 * pcfg.sgd.kappa));  // fleet total
    }
  }
}

TEST_CASE("centralized SGD learns the synthetic task") {
  ExperimentConfig cfg = tiny_config(10, 2, 3);
  const std::uint64_t seed = replicate_seed(cfg.master_seed, 1);
  const Environment env = build_environment(cfg, seed);
  const ProtocolConfig pcfg = protocol_config(cfg);
  const ExperimentResult res =
      run_experiment(Variant::kCentralizedSgd, env, pcfg, seed, 0);
  CHECK(res.rounds.back().test_accuracy > 0.5);
  CHECK(res.rounds.back().global_loss < res.rounds.front().global_loss);
}
