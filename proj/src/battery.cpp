// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#include "aerofl/battery.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <thread>

#include "aerofl/svg.hpp"

namespace aerofl {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

SpatialField generate_field(const ExperimentConfig& config, std::uint64_t run_seed,
                            int acv) {
  const auto& env = config.environment;
  SpatialField field;
  if (env.explicit_clusters) {
    for (const auto& spec : env.clusters)
      field.clusters.push_back({spec.mean, spec.cov, spec.weight});
    return field;
  }
  Rng rng(substream_seed(run_seed, "field", acv));
  const double mx = 0.5 * env.roi.width * (1.0 - 2.0 * env.placement_margin);
  const double my = 0.5 * env.roi.height * (1.0 - 2.0 * env.placement_margin);
  for (int c = 0; c < env.cluster_count; ++c) {
    GaussianCluster cl;
    cl.mean = {rng.uniform(-mx, mx), rng.uniform(-my, my)};
    const double sx = rng.uniform(env.radius_min, env.radius_max);
    const double sy = rng.uniform(env.radius_min, env.radius_max);
    cl.covariance << sx * sx, 0.0, 0.0, sy * sy;
    cl.weight = 1.0 / env.cluster_count;
    field.clusters.push_back(cl);
  }
  return field;
}

TemporalDistribution generate_temporal(const ExperimentConfig& config,
                                       std::uint64_t run_seed, int acv,
                                       int classes) {
  Rng rng(substream_seed(run_seed, "mapping", acv));
  TemporalDistribution temporal;
  temporal.horizon = std::max(config.rounds, 1);
  temporal.mapping.resize(classes, config.environment.latent_dim);
  for (int c = 0; c < classes; ++c)
    for (int k = 0; k < config.environment.latent_dim; ++k)
      temporal.mapping(c, k) = rng.uniform(-1.0, 1.0);
  return temporal;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < std::min(threads, n); ++w)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

struct BatteryData {
  std::vector<RoundMetrics> rows;  // all (seed, variant, round)
  std::vector<std::vector<double>> loss_traces;  // one per (seed, 2CEOAFL)
  std::map<std::string, std::vector<std::uint64_t>> per_variant_bits;
  // bound evaluation rows for the 2CEOAFL runs
  struct BoundRow {
    std::uint64_t seed;
    int round;
    BoundBreakdown breakdown;
    double measured;
    bool guard_ok;
  };
  std::vector<BoundRow> bound_rows;
  std::vector<std::string> psi_lines;
  std::vector<std::string> trajectory_lines;
};

void write_metrics_csv(const fs::path& path, const std::vector<RoundMetrics>& rows,
                       int u_count) {
  std::ofstream out(path);
  out << "variant,seed,round,test_accuracy,global_loss,total_bits,compute_units";
  for (int u = 0; u < u_count; ++u) out << ",bits_" << u;
  for (int u = 0; u < u_count; ++u) out << ",delta_" << u;
  for (int u = 0; u < u_count; ++u) out << ",phi_" << u;
  out << "\n";
  for (const auto& m : rows) {
    out << variant_name(m.variant) << "," << m.seed << "," << m.round << ","
        << fmt(m.test_accuracy) << "," << fmt(m.global_loss) << ","
        << m.total_bits << "," << fmt(m.compute_units);
    for (int u = 0; u < u_count; ++u) out << "," << m.acv_bits[u];
    for (int u = 0; u < u_count; ++u) out << "," << fmt(m.acv_delta[u]);
    for (int u = 0; u < u_count; ++u) out << "," << fmt(m.acv_phi[u]);
    out << "\n";
  }
}

void write_bound_csv(const fs::path& path,
                     const std::vector<BatteryData::BoundRow>& rows) {
  std::ofstream out(path);
  out << "seed,round,loss_descent,sg_quantization,shift,dissimilarity,pruning,"
         "total,measured_masked_grad_sq,guard_ok\n";
  for (const auto& r : rows) {
    out << r.seed << "," << r.round << "," << fmt(r.breakdown.loss_descent_term)
        << "," << fmt(r.breakdown.sg_quantization_term) << ","
        << fmt(r.breakdown.shift_term) << ","
        << fmt(r.breakdown.dissimilarity_term) << ","
        << fmt(r.breakdown.pruning_term) << "," << fmt(r.breakdown.total) << ","
        << fmt(r.measured) << "," << (r.guard_ok ? 1 : 0) << "\n";
  }
}

void write_cdf_csv(const fs::path& dir,
                   const std::map<std::string, std::vector<std::uint64_t>>& bits) {
  for (const auto& [name, samples] : bits) {
    if (samples.empty()) continue;
    const CdfTable table = overhead_cdf(samples);
    std::ofstream out(dir / ("cdf_" + name + ".csv"));
    out << "bits,cum_prob\n";
    for (std::size_t i = 0; i < table.values.size(); ++i)
      out << table.values[i] << "," << fmt(table.cum_prob[i]) << "\n";
  }
}

void write_accuracy_svg(const fs::path& path,
                        const std::vector<RoundMetrics>& rows) {
  // Mean accuracy per (variant, round) across seeds.
  std::map<std::string, std::map<int, std::pair<double, int>>> agg;
  for (const auto& m : rows) {
    auto& cell = agg[variant_name(m.variant)][m.round];
    cell.first += m.test_accuracy;
    cell.second += 1;
  }
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  SvgChart chart("Test accuracy by round", "round", "accuracy");
  int k = 0;
  for (const auto& [name, by_round] : agg) {
    std::vector<double> xs, ys;
    for (const auto& [round, cell] : by_round) {
      xs.push_back(round);
      ys.push_back(cell.first / cell.second);
    }
    chart.add_series(name, colors[k++ % 5], std::move(xs), std::move(ys));
  }
  std::ofstream(path) << chart.render();
}

void write_cdf_svg(const fs::path& path,
                   const std::map<std::string, std::vector<std::uint64_t>>& bits) {
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  SvgChart chart("Communication overhead CDF", "payload bits", "cumulative probability");
  int k = 0;
  for (const auto& [name, samples] : bits) {
    if (samples.empty()) continue;
    const CdfTable table = overhead_cdf(samples);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < table.values.size(); ++i) {
      xs.push_back(static_cast<double>(table.values[i]));
      ys.push_back(table.cum_prob[i]);
    }
    chart.add_series(name, colors[k++ % 5], std::move(xs), std::move(ys), true);
  }
  std::ofstream(path) << chart.render();
}

}  // namespace

std::uint64_t replicate_seed(std::uint64_t master_seed, int k) {
  return substream_seed(master_seed, "replicate", static_cast<std::uint64_t>(k));
}

ProtocolConfig protocol_config(const ExperimentConfig& config) {
  ProtocolConfig cfg;
  cfg.sgd = config.sgd;
  cfg.compression = config.compression;
  cfg.hidden = config.hidden;
  return cfg;
}

Environment build_environment(const ExperimentConfig& config,
                              std::uint64_t run_seed, int threads) {
  config.validate();
  Environment env;
  env.roi = config.environment.roi;
  env.rounds = config.rounds;
  const int classes = config.environment.explicit_clusters
                          ? static_cast<int>(config.environment.clusters.size())
                          : config.environment.cluster_count;
  env.feature_model = FeatureModel::make(
      classes, config.environment.feature_dim, config.environment.separation,
      config.environment.feature_sigma);
  env.acvs.resize(config.fleet);

  parallel_for(config.fleet, threads, [&](int u) {
    AcvEnvironment& acv = env.acvs[u];
    acv.field = generate_field(config, run_seed, u);
    acv.field.validate(env.roi);
    acv.temporal = generate_temporal(config, run_seed, u, classes);

    const int horizon = std::max(config.rounds, 1);
    TrajectoryProblem problem =
        TrajectoryProblem::make(env.roi, acv.field, acv.temporal, horizon);
    problem.zeta = config.trajectory.zeta;
    problem.d_min = config.trajectory.d_min;
    problem.visit_cap = config.trajectory.visit_cap;
    problem.eps_tol = config.trajectory.eps_tol;

    Trajectory best;
    bool have = false;
    for (int variant = 0; variant < config.trajectory.anchor_variants; ++variant) {
      try {
        Trajectory traj = optimize(problem, default_anchors(problem, variant),
                                   config.trajectory.max_iters,
                                   config.trajectory.precision);
        if (!have || traj.objective_value > best.objective_value) {
          best = std::move(traj);
          have = true;
        }
      } catch (const std::runtime_error&) {
        // try the next anchor pattern
      }
    }
    if (!have)
      throw std::runtime_error("build_environment: trajectory optimization failed");
    acv.trajectory = std::move(best);

    // Train dataset: init set, then one sensing pass per round.
    Rng init_rng(substream_seed(run_seed, "initdata", u));
    acv.train = init_dataset(u, acv.temporal, config.environment.init_scale_train,
                             env.feature_model, init_rng);
    acv.train_size_at.assign(std::max(config.rounds, 1), acv.train.size());
    for (int t = 1; t < config.rounds; ++t) {
      Rng rng(substream_seed(run_seed, "sense", u, t));
      sense_and_update(acv.train, t, acv.trajectory.positions[t],
                       acv.trajectory.indicators.row(t).transpose(),
                       acv.temporal, acv.field, config.environment.n_max_train,
                       env.feature_model, rng);
      acv.train_size_at[t] = acv.train.size();
    }

    Rng test_rng(substream_seed(run_seed, "testinit", u));
    acv.test = init_dataset(u, acv.temporal, config.environment.init_scale_test,
                            env.feature_model, test_rng);
    acv.test_size_at.assign(std::max(config.rounds, 1), acv.test.size());
    for (int t = 1; t < config.rounds; ++t) {
      Rng rng(substream_seed(run_seed, "sensetest", u, t));
      sense_and_update(acv.test, t, acv.trajectory.positions[t],
                       acv.trajectory.indicators.row(t).transpose(),
                       acv.temporal, acv.field, config.environment.n_max_test,
                       env.feature_model, rng);
      acv.test_size_at[t] = acv.test.size();
    }
  });
  return env;
}

int run_battery(const ExperimentConfig& config, const std::string& out_dir,
                int threads, bool dry_run, std::ostream& log) {
  config.validate();
  if (dry_run) {
    log << "battery plan (dry run):\n"
        << "  seeds: " << config.replications << " (master " << config.master_seed
        << ")\n  rounds: " << config.rounds << "\n  fleet: " << config.fleet
        << "\n  variants:";
    for (const Variant v : config.variants) log << " " << variant_name(v);
    log << "\n  output: " << out_dir << " (not written)\n";
    return 0;
  }

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const ProtocolConfig cfg = protocol_config(config);
  BatteryData data;

  for (int k = 0; k < config.replications; ++k) {
    const std::uint64_t run_seed = replicate_seed(config.master_seed, k);
    const Environment env = build_environment(config, run_seed, threads);

    // psi and trajectory exports for this seed.
    for (int u = 0; u < env.acv_count(); ++u) {
      const Eigen::MatrixXd psi =
          class_distribution_table(env.acvs[u].temporal, std::max(config.rounds, 1));
      for (int t = 0; t < psi.rows(); ++t)
        for (int c = 0; c < psi.cols(); ++c)
          data.psi_lines.push_back(std::to_string(k) + "," + std::to_string(u) +
                                   "," + std::to_string(t) + "," +
                                   std::to_string(c) + "," + fmt(psi(t, c)));
      const auto schedule = env.acvs[u].trajectory.schedule();
      for (int t = 0; t < config.rounds; ++t) {
        const auto& q = env.acvs[u].trajectory.positions[t];
        data.trajectory_lines.push_back(
            std::to_string(k) + "," + std::to_string(u) + "," +
            std::to_string(t) + "," + fmt(q.x()) + "," + fmt(q.y()) + "," +
            std::to_string(schedule[t]));
      }
    }

    std::vector<ExperimentResult> results(config.variants.size());
    parallel_for(static_cast<int>(config.variants.size()), threads, [&](int i) {
      results[i] = run_experiment(config.variants[i], env, cfg, run_seed,
                                  static_cast<std::uint64_t>(k), 1);
    });

    for (std::size_t i = 0; i < config.variants.size(); ++i) {
      const Variant variant = config.variants[i];
      const ExperimentResult& res = results[i];
      for (const auto& m : res.rounds) {
        auto& bucket = data.per_variant_bits[variant_name(variant)];
        for (int u = 0; u < env.acv_count(); ++u)
          if (m.acv_bits[u] > 0 || variant != Variant::kCentralizedSgd)
            bucket.push_back(m.acv_bits[u]);
        data.rows.push_back(m);
      }

      if (variant == Variant::kTwoCeoAfl && config.rounds > 0) {
        // Bound evaluation with constants estimated at the initial model.
        Rng init_rng(substream_seed(run_seed, "init"));
        const ParamVector w0 = ParamVector::random_init(
            env.feature_model.feature_dim(), cfg.hidden,
            env.feature_model.classes(), init_rng);
        Rng beta_rng(substream_seed(run_seed, "beta"));
        Rng sigma_rng(substream_seed(run_seed, "sigma"));
        const auto& ds0 = env.acvs[0].train;
        BoundInputs inputs;
        inputs.beta =
            2.0 * estimate_beta(w0, ds0, 10, 1e-3, beta_rng);  // x2 safety
        inputs.sigma2 =
            estimate_sigma2(w0, ds0, cfg.sgd.batch_size, 30, sigma_rng);
        inputs.q = quantizer_variance_bound(w0.size(), cfg.compression.s);
        inputs.kappa = cfg.sgd.kappa;
        inputs.alpha = Eigen::VectorXd::Constant(env.acv_count(),
                                                 1.0 / env.acv_count());
        const LrGuard guard =
            learning_rate_guard(inputs.beta, cfg.sgd.kappa, inputs.q,
                                inputs.rho1, cfg.sgd, config.rounds);
        for (const auto& m : res.rounds) {
          inputs.eta.push_back(cfg.sgd.global_lr.at(m.round));
          inputs.eta_tilde.push_back(cfg.sgd.local_lr.at(m.round));
          const int u_count = env.acv_count();
          Eigen::VectorXd phi(u_count), epsv(u_count), deltav(u_count), qv(u_count);
          for (int u = 0; u < u_count; ++u) {
            phi[u] = m.acv_phi[u];
            epsv[u] = m.acv_epsilon[u];
            deltav[u] = m.acv_delta[u];
            qv[u] = m.acv_qprob[u];
          }
          inputs.phi.push_back(phi);
          inputs.epsilon.push_back(epsv);
          inputs.delta.push_back(deltav);
          inputs.q_prob.push_back(qv);
          inputs.w_norm_sq.push_back(m.w_norm_sq);
        }
        const auto breakdown = evaluate_bound(inputs, res.loss_trace);
        for (int t = 0; t < config.rounds; ++t)
          data.bound_rows.push_back({static_cast<std::uint64_t>(k), t,
                                     breakdown[t], res.rounds[t].masked_grad_sq,
                                     guard.satisfied[t]});
      }
    }
  }

  write_metrics_csv(dir / "metrics.csv", data.rows, config.fleet);
  if (!data.bound_rows.empty()) write_bound_csv(dir / "bound.csv", data.bound_rows);
  write_cdf_csv(dir, data.per_variant_bits);
  {
    std::ofstream psi_out(dir / "psi.csv");
    psi_out << "seed,acv,round,class,psi\n";
    for (const auto& line : data.psi_lines) psi_out << line << "\n";
    std::ofstream traj_out(dir / "trajectory.csv");
    traj_out << "seed,acv,round,x,y,associated_cluster\n";
    for (const auto& line : data.trajectory_lines) traj_out << line << "\n";
  }
  write_accuracy_svg(dir / "accuracy.svg", data.rows);
  write_cdf_svg(dir / "comm_cdf.svg", data.per_variant_bits);

  // Manifest: configuration echo and hash. Timing is logged, not written,
  // so equal configurations produce byte-identical trees.
  {
    std::ofstream manifest(dir / "manifest.json");
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016" PRIx64, config_hash(config));
    manifest << "{\n  \"config_hash\": \"" << hash << "\",\n"
             << "  \"schema_version\": " << config.schema_version << ",\n"
             << "  \"config\": " << save_config(config) << "\n}\n";
  }
  log << "battery complete: " << data.rows.size() << " metric rows -> "
      << out_dir << "\n";
  return 0;
}

void regenerate_plots(const std::string& dir) {
  const fs::path root(dir);
  // Accuracy plot from metrics.csv.
  std::ifstream metrics(root / "metrics.csv");
  if (!metrics) throw std::runtime_error("plot: missing metrics.csv in " + dir);
  std::string line;
  std::getline(metrics, line);  // header
  std::map<std::string, std::map<int, std::pair<double, int>>> acc;
  std::map<std::string, std::vector<std::uint64_t>> bits;
  while (std::getline(metrics, line)) {
    std::stringstream ss(line);
    std::string variant, field;
    std::getline(ss, variant, ',');
    std::getline(ss, field, ',');
    std::getline(ss, field, ',');
    const int round = std::stoi(field);
    std::getline(ss, field, ',');
    auto& cell = acc[variant][round];
    cell.first += std::stod(field);
    cell.second += 1;
  }
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  SvgChart chart("Test accuracy by round", "round", "accuracy");
  int k = 0;
  for (const auto& [name, by_round] : acc) {
    std::vector<double> xs, ys;
    for (const auto& [round, cell] : by_round) {
      xs.push_back(round);
      ys.push_back(cell.first / cell.second);
    }
    chart.add_series(name, colors[k++ % 5], std::move(xs), std::move(ys));
  }
  std::ofstream(root / "accuracy.svg") << chart.render();

  // CDF plot from the cdf_*.csv tables.
  SvgChart cdf_chart("Communication overhead CDF", "payload bits",
                     "cumulative probability");
  k = 0;
  for (const auto& entry : fs::directory_iterator(root)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("cdf_", 0) != 0 || entry.path().extension() != ".csv")
      continue;
    std::ifstream in(entry.path());
    std::getline(in, line);
    std::vector<double> xs, ys;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      xs.push_back(std::stod(line.substr(0, comma)));
      ys.push_back(std::stod(line.substr(comma + 1)));
    }
    cdf_chart.add_series(name.substr(4, name.size() - 8), colors[k++ % 5],
                         std::move(xs), std::move(ys), true);
  }
  std::ofstream(root / "comm_cdf.svg") << cdf_chart.render();
}

}  // namespace aerofl
