// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

// Acceptance suite: one criterion per entry, each printing a single
// pass/fail line. Run everything or a single criterion with --only N.

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <vector>

#include "aerofl/checks.hpp"

namespace {

struct Criterion {
  int id;
  const char* name;
  std::function<aerofl::CheckResult()> run;
};

std::string scratch_dir() {
  return (std::filesystem::temp_directory_path() / "aerofl_acceptance").string();
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
      only = std::atoi(argv[i + 1]);

  using aerofl::CheckResult;
  const std::vector<Criterion> criteria{
      {1, "quantizer unbiasedness (50 vectors, p=874, s=3, 100k seeds, <60s)",
       [] { return aerofl::check_quantizer_unbiased(50, 874, 3, 100000, 4.0, 60.0); }},
      {2, "quantizer variance within min(p/s^2, sqrt(p)/s)",
       [] { return aerofl::check_quantizer_variance(50, 874, 3, 2000); }},
      {3, "pruning energy bound, 10k random (w, delta) pairs",
       [] { return aerofl::check_assumption5(10000, 874); }},
      {4, "trajectory oracle battery, 20 instances within 5% (<2 min)",
       [] { return aerofl::check_trajectory_battery(20, 0.05, 9, 120.0); }},
      {5, "variant degeneration: 2CEOAFL(delta=0,q=1) == AFL, 3 seeds x 30 rounds",
       [] { return aerofl::check_variant_degeneration(30, 3); }},
      {6, "accuracy ordering SGD >= AFL >= 2CEOAFL, gap <= 3pp, 5 seeds",
       [] { return aerofl::check_accuracy_ordering(5, 0.03); }},
      {7, "communication dominance AFL >= AFL-Prune >= 2CEOAFL >= AFL-Quant",
       [] { return aerofl::check_comm_dominance(5); }},
      {8, "payload formula vs independent evaluator, 1000 cases",
       [] { return aerofl::check_payload_formula(1000); }},
      {9, "gradient finite differences, 5 models x 20 directions @1e-5",
       [] { return aerofl::check_gradient_fd(5, 20, 1e-5); }},
      {10, "bound algebra: c_u(q,1)=2 and per-term isolation",
       [] { return aerofl::check_cu_algebra(100); }},
      {11, "battery determinism across runs and thread counts",
       [] { return aerofl::check_determinism(scratch_dir()); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const CheckResult result = c.run();
    std::printf("criterion %2d [%s] %s: %s\n", c.id,
                result.pass ? "PASS" : "FAIL", c.name, result.detail.c_str());
    std::fflush(stdout);
    failures += result.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
