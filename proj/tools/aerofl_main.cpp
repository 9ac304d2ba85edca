// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "aerofl/battery.hpp"
#include "aerofl/checks.hpp"
#include "aerofl/config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerifyFailed = 3;

std::string default_out_root() {
  const char* env = std::getenv("AEROFL_OUT_ROOT");
  return env ? env : "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aerofl: online aerial federated-learning simulator"};
  app.require_subcommand(1);

  std::string config_path, preset = "paper", out_dir;
  int threads = 2;
  bool dry_run = false;

  auto* run = app.add_subcommand("run", "run an experiment battery");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--preset", preset, "base preset: paper or desk");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--threads", threads, "worker threads");
  run->add_flag("--dry-run", dry_run, "print the resolved plan, write nothing");

  auto* verify = app.add_subcommand("verify", "run the verification suites");
  verify->add_option("--config", config_path, "JSON config file");
  verify->add_option("--preset", preset, "base preset: paper or desk");

  int acv = 0;
  auto* traj = app.add_subcommand("trajectory", "solve and export one trajectory");
  traj->add_option("--config", config_path, "JSON config file");
  traj->add_option("--preset", preset, "base preset: paper or desk");
  traj->add_option("--acv", acv, "vehicle index")->required();
  traj->add_option("--out", out_dir, "CSV output path (default stdout)");

  std::string plot_dir;
  auto* plot = app.add_subcommand("plot", "regenerate SVG plots from CSVs");
  plot->add_option("--in", plot_dir, "battery output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      aerofl::ExperimentConfig config;
      try {
        config = aerofl::load_config(config_path, preset);
      } catch (const aerofl::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
      }
      std::string dir = !out_dir.empty() ? out_dir
                        : !config.output_dir.empty()
                            ? config.output_dir
                            : default_out_root() + "/battery";
      const auto start = std::chrono::steady_clock::now();
      const int rc = aerofl::run_battery(config, dir, threads, dry_run, std::cout);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();
      if (!dry_run) std::printf("wall clock: %.2f s\n", secs);
      return rc == 0 ? kExitOk : kExitRuntime;
    }

    if (verify->parsed()) {
      aerofl::ExperimentConfig config;
      try {
        config = aerofl::load_config(config_path, preset.empty() ? "desk" : preset);
      } catch (const aerofl::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
      }
      const std::string scratch = default_out_root() + "/verify_scratch";
      const auto results = aerofl::run_verify_suite(config, scratch);
      int failures = 0;
      for (const auto& r : results) {
        std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        failures += r.pass ? 0 : 1;
      }
      std::printf("%zu suites, %d failures\n", results.size(), failures);
      return failures == 0 ? kExitOk : kExitVerifyFailed;
    }

    if (traj->parsed()) {
      aerofl::ExperimentConfig config;
      try {
        config = aerofl::load_config(config_path, preset);
        if (acv < 0 || acv >= config.fleet)
          throw aerofl::ConfigError("trajectory: --acv out of range");
      } catch (const aerofl::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
      }
      const auto env = aerofl::build_environment(
          config, aerofl::replicate_seed(config.master_seed, 0), threads);
      const auto& t = env.acvs[acv].trajectory;
      const auto schedule = t.schedule();
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!out_dir.empty()) {
        file.open(out_dir);
        if (!file) throw std::runtime_error("cannot open " + out_dir);
        out = &file;
      }
      *out << "acv,round,x,y,associated_cluster\n";
      for (int r = 0; r < config.rounds; ++r) {
        char line[128];
        std::snprintf(line, sizeof(line), "%d,%d,%.10g,%.10g,%d\n", acv, r,
                      t.positions[r].x(), t.positions[r].y(), schedule[r]);
        *out << line;
      }
      return kExitOk;
    }

    if (plot->parsed()) {
      aerofl::regenerate_plots(plot_dir);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
