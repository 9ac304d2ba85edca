// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>
#include <vector>

#include "aerofl/battery.hpp"
#include "aerofl/config.hpp"
#include "aerofl/trajectory.hpp"

namespace aerofl {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Finite-difference agreement of the backprop gradient.
CheckResult check_gradient_fd(int models = 5, int directions = 20,
                              double rel_tol = 1e-5);

// Monte-Carlo mean of decode(quantize(d)) against d, per coordinate, within
// se_mult standard errors. Also enforces the runtime budget in seconds.
CheckResult check_quantizer_unbiased(int vectors = 50, int p = 874, int s = 3,
                                     int draws = 100000, double se_mult = 4.0,
                                     double budget_seconds = 60.0);

// Measured quantizer variance ratio against min(p/s^2, sqrt(p)/s).
CheckResult check_quantizer_variance(int vectors = 50, int p = 874, int s = 3,
                                     int draws = 2000);

// Magnitude pruning satisfies ||w - w.m||^2 <= delta ||w||^2 always.
CheckResult check_assumption5(int cases = 10000, int p = 874);

// payload_bits against an independent integer-arithmetic evaluator.
CheckResult check_payload_formula(int cases = 1000);

// c_u(q, 1) == 2 and per-term isolation of the bound evaluator.
CheckResult check_cu_algebra(int cases = 100);

// support(w) subset of support(mask); used as an injectable negative control.
CheckResult check_mask_closure(const ParamVector& w, const Mask& mask);

// Deterministic oracle-vs-SCA battery instance, k in [0, 20).
TrajectoryProblem oracle_battery_instance(int k);

// SCA exactly feasible and within gap_tol of the oracle optimum on
// `instances` battery instances; enforces the runtime budget.
CheckResult check_trajectory_battery(int instances = 20, double gap_tol = 0.05,
                                     int grid = 9,
                                     double budget_seconds = 120.0);

// Bit-identical metric traces for 2CEOAFL(delta=0, q=1) versus AFL.
CheckResult check_variant_degeneration(int rounds = 30, int seeds = 3);

// Runs `seeds` replications of the desk battery for the given variants and
// returns all metric rows (shared by the ordering and dominance checks).
std::vector<RoundMetrics> run_matrix(const ExperimentConfig& config,
                                     const std::vector<Variant>& variants,
                                     int seeds, int threads = 2);

// Mean final accuracy ordering SGD >= AFL >= 2CEOAFL with a bounded gap.
CheckResult check_accuracy_ordering(int seeds = 5, double max_gap = 0.03);

// Per-round bit totals AFL >= AFL-Prune >= 2CEOAFL >= AFL-Quant and the
// matching quantile-wise CDF ordering.
CheckResult check_comm_dominance(int seeds = 5);

// Byte-identical battery output trees across repeated runs and thread counts.
CheckResult check_determinism(const std::string& scratch_dir);

// Directory comparison helper (file sets and byte contents).
bool trees_identical(const std::string& a, const std::string& b,
                     std::string* detail);

std::vector<CheckResult> run_verify_suite(const ExperimentConfig& config,
                                          const std::string& scratch_dir);

}  // namespace aerofl
