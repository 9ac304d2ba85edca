// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#include "aerofl/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "aerofl/battery.hpp"
#include "aerofl/svg.hpp"
#include "doctest.h"

using namespace aerofl;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("paper preset carries the reference parameters") {
  const ExperimentConfig c = config_from_preset("paper");
  CHECK(c.fleet == 10);
  CHECK(c.rounds == 100);
  CHECK(c.environment.cluster_count == 10);
  CHECK(c.sgd.kappa == 5);
  CHECK(c.sgd.rho == 1);
  CHECK(c.sgd.batch_size == 64);
  CHECK(c.sgd.global_lr.initial == 0.1);
  CHECK(c.sgd.global_lr.decay == doctest::Approx(0.9));
  CHECK(c.sgd.global_lr.decay_every == 20);
  CHECK(c.sgd.local_lr.initial == 0.1);
  CHECK(c.sgd.local_lr.decay_every == 50);
  CHECK(c.compression.s == 3);
  CHECK(c.compression.delta_min == 0.05);
  CHECK(c.compression.delta_max == 0.7);
  CHECK(c.compression.delta_th == 0.7);
  CHECK(c.compression.q_equals_delta);
  CHECK(c.environment.n_max_train == 420);
  CHECK(c.environment.n_max_test == 80);
  CHECK(c.environment.init_scale_train == 512);
  CHECK(c.environment.init_scale_test == 128);
  CHECK(c.environment.feature_dim == 16);
  CHECK(c.hidden == 32);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("empty file plus preset keeps the defaults") {
  const std::string path = write_temp("aerofl_empty.json", "  \n");
  const ExperimentConfig c = load_config(path, "paper");
  CHECK(save_config(c) == save_config(config_from_preset("paper")));
}

TEST_CASE("config round-trips through save/load") {
  ExperimentConfig c = config_from_preset("desk");
  c.master_seed = 777;
  c.compression.q_equals_delta = false;
  c.compression.q_fixed = 0.25;
  c.variants = {Variant::kAfl, Variant::kTwoCeoAfl};
  const std::string path = write_temp("aerofl_roundtrip.json", save_config(c));
  const ExperimentConfig back = load_config(path, "desk");
  CHECK(save_config(back) == save_config(c));
  CHECK(config_hash(back) == config_hash(c));
}

TEST_CASE("invalid configurations raise distinct diagnostics") {
  SUBCASE("missing file") {
    CHECK_THROWS_WITH_AS(load_config("/nonexistent/nope.json", "desk"),
                         doctest::Contains("cannot open"), ConfigError);
  }
  SUBCASE("parse error") {
    const std::string path = write_temp("aerofl_bad.json", "{not json");
    CHECK_THROWS_WITH_AS(load_config(path, "desk"),
                         doctest::Contains("parse error"), ConfigError);
  }
  SUBCASE("unknown key") {
    const std::string path = write_temp("aerofl_unknown.json",
                                        R"({"fleeet": 3})");
    CHECK_THROWS_WITH_AS(load_config(path, "desk"),
                         doctest::Contains("unknown key"), ConfigError);
  }
  SUBCASE("invariant violation: zero fleet") {
    const std::string path = write_temp("aerofl_zero_u.json", R"({"fleet": 0})");
    CHECK_THROWS_WITH_AS(load_config(path, "desk"),
                         doctest::Contains("fleet"), ConfigError);
  }
  SUBCASE("pruning range above the threshold") {
    const std::string path = write_temp(
        "aerofl_delta.json", R"({"compression": {"delta_max": 0.9}})");
    CHECK_THROWS_AS(load_config(path, "desk"), ConfigError);
  }
}

TEST_CASE("explicit cluster lists are honored") {
  const std::string path = write_temp("aerofl_clusters.json", R"({
    "environment": {
      "clusters": [
        {"mean": [10, 20], "cov": [[100, 0], [0, 100]], "weight": 0.5},
        {"mean": [-10, -20], "cov": [[64, 0], [0, 81]], "weight": 0.5}
      ],
      "feature": {"dim": 8, "separation": 1.5, "sigma": 1.0}
    },
    "fleet": 2,
    "protocol": {"variants": ["AFL"], "rounds": 3}
  })");
  const ExperimentConfig c = load_config(path, "desk");
  CHECK(c.environment.explicit_clusters);
  REQUIRE(c.environment.clusters.size() == 2);
  CHECK(c.environment.clusters[1].cov(1, 1) == 81.0);

  const Environment env = build_environment(c, replicate_seed(c.master_seed, 0));
  CHECK(env.acvs[0].field.size() == 2);
  CHECK(env.acvs[0].field.clusters[0].mean.x() == 10.0);
}

TEST_CASE("svg charts render well-formed documents") {
  SvgChart chart("demo", "x", "y");
  chart.add_series("a", "#ff0000", {0, 1, 2}, {0.5, 0.2, 0.9});
  chart.add_series("b", "#0000ff", {0, 1, 2}, {0.1, 0.4, 0.3}, true);
  const std::string svg = chart.render();
  CHECK(svg.find("<?xml") == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("path") != std::string::npos);
  CHECK(svg.find("demo") != std::string::npos);
}

TEST_CASE("battery dry run writes nothing") {
  ExperimentConfig cfg = config_from_preset("desk");
  cfg.rounds = 2;
  const std::string dir =
      (std::filesystem::temp_directory_path() / "aerofl_dry").string();
  std::filesystem::remove_all(dir);
  std::ostringstream log;
  CHECK(run_battery(cfg, dir, 1, true, log) == 0);
  CHECK(!std::filesystem::exists(dir));
  CHECK(log.str().find("dry run") != std::string::npos);
}

TEST_CASE("battery writes the documented artifact tree") {
  ExperimentConfig cfg = config_from_preset("desk");
  cfg.rounds = 3;
  cfg.replications = 1;
  cfg.fleet = 2;
  cfg.environment.cluster_count = 3;
  cfg.variants = {Variant::kAfl, Variant::kTwoCeoAfl};
  const std::string dir =
      (std::filesystem::temp_directory_path() / "aerofl_tree").string();
  std::filesystem::remove_all(dir);
  std::ostringstream log;
  REQUIRE(run_battery(cfg, dir, 2, false, log) == 0);
  for (const char* name :
       {"metrics.csv", "bound.csv", "psi.csv", "trajectory.csv", "manifest.json",
        "accuracy.svg", "comm_cdf.svg", "cdf_AFL.csv", "cdf_2CEOAFL.csv"})
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / name));

  std::ifstream metrics(std::filesystem::path(dir) / "metrics.csv");
  std::string header;
  std::getline(metrics, header);
  CHECK(header ==
        "variant,seed,round,test_accuracy,global_loss,total_bits,"
        "compute_units,bits_0,bits_1,delta_0,delta_1,phi_0,phi_1");
  int lines = 0;
  for (std::string line; std::getline(metrics, line);) ++lines;
  CHECK(lines == 2 * 3);  // variants x rounds

  // plot regeneration accepts its own output
  CHECK_NOTHROW(regenerate_plots(dir));
}
