// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#include "aerofl/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace aerofl {

namespace {

using nlohmann::json;

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known)
      throw ConfigError("config: unknown key '" + key + "' in " + context);
  }
}

template <typename T>
void maybe(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

json roi_to_json(const RoiConfig& roi) {
  return {{"width", roi.width},
          {"height", roi.height},
          {"gbs", {roi.gbs_position.x(), roi.gbs_position.y()}},
          {"altitude", roi.acv_altitude},
          {"fov", roi.fov}};
}

void roi_from_json(const json& j, RoiConfig& roi) {
  require_keys(j, {"width", "height", "gbs", "altitude", "fov"}, "environment.roi");
  maybe(j, "width", roi.width);
  maybe(j, "height", roi.height);
  if (j.contains("gbs")) {
    const auto g = j.at("gbs");
    if (!g.is_array() || g.size() != 2)
      throw ConfigError("config: environment.roi.gbs must be [x, y]");
    roi.gbs_position = {g[0].get<double>(), g[1].get<double>()};
  }
  maybe(j, "altitude", roi.acv_altitude);
  maybe(j, "fov", roi.fov);
}

json env_to_json(const EnvironmentConfig& env) {
  json j{{"roi", roi_to_json(env.roi)},
         {"temporal", {{"latent_dim", env.latent_dim}}},
         {"feature",
          {{"dim", env.feature_dim},
           {"separation", env.separation},
           {"sigma", env.feature_sigma}}},
         {"n_max_train", env.n_max_train},
         {"n_max_test", env.n_max_test},
         {"init_scale_train", env.init_scale_train},
         {"init_scale_test", env.init_scale_test}};
  if (env.explicit_clusters) {
    json arr = json::array();
    for (const auto& c : env.clusters)
      arr.push_back({{"mean", {c.mean.x(), c.mean.y()}},
                     {"cov",
                      {{c.cov(0, 0), c.cov(0, 1)}, {c.cov(1, 0), c.cov(1, 1)}}},
                     {"weight", c.weight}});
    j["clusters"] = arr;
  } else {
    j["clusters"] = {{"count", env.cluster_count},
                     {"radius_min", env.radius_min},
                     {"radius_max", env.radius_max},
                     {"margin", env.placement_margin}};
  }
  return j;
}

void env_from_json(const json& j, EnvironmentConfig& env) {
  require_keys(j,
               {"roi", "clusters", "temporal", "feature", "n_max_train",
                "n_max_test", "init_scale_train", "init_scale_test"},
               "environment");
  if (j.contains("roi")) roi_from_json(j.at("roi"), env.roi);
  if (j.contains("clusters")) {
    const auto& c = j.at("clusters");
    if (c.is_array()) {
      env.explicit_clusters = true;
      env.clusters.clear();
      for (const auto& e : c) {
        require_keys(e, {"mean", "cov", "weight"}, "environment.clusters[]");
        ClusterSpec spec;
        const auto m = e.at("mean");
        spec.mean = {m[0].get<double>(), m[1].get<double>()};
        const auto cov = e.at("cov");
        spec.cov << cov[0][0].get<double>(), cov[0][1].get<double>(),
            cov[1][0].get<double>(), cov[1][1].get<double>();
        spec.weight = e.value("weight", 1.0);
        env.clusters.push_back(spec);
      }
    } else {
      require_keys(c, {"count", "radius_min", "radius_max", "margin"},
                   "environment.clusters");
      env.explicit_clusters = false;
      maybe(c, "count", env.cluster_count);
      maybe(c, "radius_min", env.radius_min);
      maybe(c, "radius_max", env.radius_max);
      maybe(c, "margin", env.placement_margin);
    }
  }
  if (j.contains("temporal")) {
    require_keys(j.at("temporal"), {"latent_dim"}, "environment.temporal");
    maybe(j.at("temporal"), "latent_dim", env.latent_dim);
  }
  if (j.contains("feature")) {
    const auto& f = j.at("feature");
    require_keys(f, {"dim", "separation", "sigma"}, "environment.feature");
    maybe(f, "dim", env.feature_dim);
    maybe(f, "separation", env.separation);
    maybe(f, "sigma", env.feature_sigma);
  }
  maybe(j, "n_max_train", env.n_max_train);
  maybe(j, "n_max_test", env.n_max_test);
  maybe(j, "init_scale_train", env.init_scale_train);
  maybe(j, "init_scale_test", env.init_scale_test);
}

json lr_to_json(const LrSchedule& lr) {
  return {{"initial", lr.initial},
          {"decay", lr.decay},
          {"decay_every", lr.decay_every}};
}

void lr_from_json(const json& j, LrSchedule& lr, const std::string& context) {
  require_keys(j, {"initial", "decay", "decay_every"}, context);
  maybe(j, "initial", lr.initial);
  maybe(j, "decay", lr.decay);
  maybe(j, "decay_every", lr.decay_every);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (schema_version != 1) throw ConfigError("config: unsupported schema_version");
  if (fleet <= 0) throw ConfigError("config: fleet must be positive");
  if (rounds < 0) throw ConfigError("config: rounds must be >= 0");
  if (replications <= 0) throw ConfigError("config: replications must be positive");
  if (environment.latent_dim != 4)
    throw ConfigError("config: temporal latent_dim must be 4 (sinusoidal basis)");
  const int classes = environment.explicit_clusters
                          ? static_cast<int>(environment.clusters.size())
                          : environment.cluster_count;
  if (classes <= 0) throw ConfigError("config: at least one cluster required");
  if (classes > environment.feature_dim)
    throw ConfigError("config: feature dim must be >= class count");
  if (environment.radius_min <= 0.0 ||
      environment.radius_max < environment.radius_min)
    throw ConfigError("config: bad cluster radius range");
  if (environment.n_max_train <= 0 || environment.n_max_test <= 0 ||
      environment.init_scale_train <= 0 || environment.init_scale_test <= 0)
    throw ConfigError("config: sample-arrival scales must be positive");
  try {
    environment.roi.validate();
    sgd.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(trajectory.zeta > 0.0 && trajectory.zeta <= 1.0))
    throw ConfigError("config: trajectory.zeta must lie in (0,1]");
  if (trajectory.d_min < 0.0 || trajectory.visit_cap < 0 ||
      trajectory.max_iters < 1 || trajectory.precision <= 0.0 ||
      trajectory.eps_tol <= 0.0 || trajectory.anchor_variants < 1)
    throw ConfigError("config: bad trajectory parameters");
  if (compression.s < 1) throw ConfigError("config: compression.s must be >= 1");
  if (compression.delta_min < 0.0 ||
      compression.delta_max < compression.delta_min ||
      compression.delta_max > compression.delta_th ||
      compression.delta_th > 1.0)
    throw ConfigError("config: pruning range must satisfy 0 <= min <= max <= th <= 1");
  if (variants.empty()) throw ConfigError("config: variant list is empty");
  if (hidden <= 0) throw ConfigError("config: hidden width must be positive");
}

ExperimentConfig config_from_preset(const std::string& preset) {
  ExperimentConfig c;
  if (preset == "paper") {
    // Reference setting: U=10 vehicles, T=100 rounds, C=10 classes,
    // kappa=5, batch 64, s=3, pruning ratio in [0.05, 0.7], lr 0.1 decayed
    // 10% every 20 (global) and 50 (local) rounds.
    c.fleet = 10;
    c.rounds = 100;
    c.environment.cluster_count = 10;
    c.hidden = 32;
    c.replications = 1;
  } else if (preset == "desk") {
    c.fleet = 4;
    c.rounds = 30;
    c.environment.cluster_count = 4;
    c.hidden = 16;
    c.replications = 2;
    c.environment.roi.width = 600.0;
    c.environment.roi.height = 600.0;
    c.environment.radius_min = 30.0;
    c.environment.radius_max = 60.0;
    c.environment.n_max_train = 80;
    c.environment.n_max_test = 40;
    c.environment.separation = 1.4;
    c.sgd.rho = 2;
    // decay cadence scaled from the reference horizon (20/50 at T=100)
    c.sgd.global_lr = {0.09, 0.9, 6};
    c.sgd.local_lr = {0.09, 0.9, 15};
  } else {
    throw ConfigError("config: unknown preset '" + preset + "'");
  }
  c.variants = {Variant::kCentralizedSgd, Variant::kAfl, Variant::kAflPrune,
                Variant::kAflQuant, Variant::kTwoCeoAfl};
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::string& preset) {
  ExperimentConfig config = config_from_preset(preset);
  json j = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
      try {
        j = json::parse(text);
      } catch (const json::parse_error& e) {
        throw ConfigError("config: parse error in '" + path + "': " + e.what());
      }
    }
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  require_keys(j,
               {"schema_version", "environment", "fleet", "trajectory",
                "learner", "compression", "protocol", "seeds", "output_dir"},
               "top level");

  maybe(j, "schema_version", config.schema_version);
  if (j.contains("environment")) env_from_json(j.at("environment"), config.environment);
  maybe(j, "fleet", config.fleet);
  if (j.contains("trajectory")) {
    const auto& t = j.at("trajectory");
    require_keys(t,
                 {"zeta", "d_min", "visit_cap", "max_iters", "precision",
                  "eps_tol", "anchor_variants"},
                 "trajectory");
    maybe(t, "zeta", config.trajectory.zeta);
    maybe(t, "d_min", config.trajectory.d_min);
    maybe(t, "visit_cap", config.trajectory.visit_cap);
    maybe(t, "max_iters", config.trajectory.max_iters);
    maybe(t, "precision", config.trajectory.precision);
    maybe(t, "eps_tol", config.trajectory.eps_tol);
    maybe(t, "anchor_variants", config.trajectory.anchor_variants);
  }
  if (j.contains("learner")) {
    const auto& l = j.at("learner");
    require_keys(l,
                 {"hidden", "kappa", "rho", "batch_size", "batches_per_round",
                  "global_lr", "local_lr"},
                 "learner");
    maybe(l, "hidden", config.hidden);
    maybe(l, "kappa", config.sgd.kappa);
    maybe(l, "rho", config.sgd.rho);
    maybe(l, "batch_size", config.sgd.batch_size);
    maybe(l, "batches_per_round", config.sgd.batches_per_round);
    if (l.contains("global_lr"))
      lr_from_json(l.at("global_lr"), config.sgd.global_lr, "learner.global_lr");
    if (l.contains("local_lr"))
      lr_from_json(l.at("local_lr"), config.sgd.local_lr, "learner.local_lr");
  }
  if (j.contains("compression")) {
    const auto& cj = j.at("compression");
    require_keys(cj, {"s", "delta_min", "delta_max", "delta_th", "q_rule", "q_fixed"},
                 "compression");
    maybe(cj, "s", config.compression.s);
    maybe(cj, "delta_min", config.compression.delta_min);
    maybe(cj, "delta_max", config.compression.delta_max);
    maybe(cj, "delta_th", config.compression.delta_th);
    if (cj.contains("q_rule")) {
      const std::string rule = cj.at("q_rule").get<std::string>();
      if (rule == "delta") {
        config.compression.q_equals_delta = true;
      } else if (rule == "fixed") {
        config.compression.q_equals_delta = false;
      } else {
        throw ConfigError("config: compression.q_rule must be 'delta' or 'fixed'");
      }
    }
    maybe(cj, "q_fixed", config.compression.q_fixed);
  }
  if (j.contains("protocol")) {
    const auto& p = j.at("protocol");
    require_keys(p, {"variants", "rounds"}, "protocol");
    if (p.contains("variants")) {
      config.variants.clear();
      for (const auto& v : p.at("variants"))
        config.variants.push_back(variant_from_name(v.get<std::string>()));
    }
    maybe(p, "rounds", config.rounds);
  }
  if (j.contains("seeds")) {
    const auto& s = j.at("seeds");
    require_keys(s, {"master", "replications"}, "seeds");
    maybe(s, "master", config.master_seed);
    maybe(s, "replications", config.replications);
  }
  maybe(j, "output_dir", config.output_dir);

  config.validate();
  return config;
}

std::string save_config(const ExperimentConfig& c) {
  json variants = json::array();
  for (const Variant v : c.variants) variants.push_back(variant_name(v));
  const json j{
      {"schema_version", c.schema_version},
      {"environment", env_to_json(c.environment)},
      {"fleet", c.fleet},
      {"trajectory",
       {{"zeta", c.trajectory.zeta},
        {"d_min", c.trajectory.d_min},
        {"visit_cap", c.trajectory.visit_cap},
        {"max_iters", c.trajectory.max_iters},
        {"precision", c.trajectory.precision},
        {"eps_tol", c.trajectory.eps_tol},
        {"anchor_variants", c.trajectory.anchor_variants}}},
      {"learner",
       {{"hidden", c.hidden},
        {"kappa", c.sgd.kappa},
        {"rho", c.sgd.rho},
        {"batch_size", c.sgd.batch_size},
        {"batches_per_round", c.sgd.batches_per_round},
        {"global_lr", lr_to_json(c.sgd.global_lr)},
        {"local_lr", lr_to_json(c.sgd.local_lr)}}},
      {"compression",
       {{"s", c.compression.s},
        {"delta_min", c.compression.delta_min},
        {"delta_max", c.compression.delta_max},
        {"delta_th", c.compression.delta_th},
        {"q_rule", c.compression.q_equals_delta ? "delta" : "fixed"},
        {"q_fixed", c.compression.q_fixed}}},
      {"protocol", {{"variants", variants}, {"rounds", c.rounds}}},
      {"seeds", {{"master", c.master_seed}, {"replications", c.replications}}},
      {"output_dir", c.output_dir}};
  return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string text = save_config(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : text) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace aerofl
