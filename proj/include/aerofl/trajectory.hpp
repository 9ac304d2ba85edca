// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "aerofl/datagen.hpp"

namespace aerofl {

// Selfish per-vehicle trajectory problem over T rounds: pick per-round
// cluster associations and positions maximizing
//   sum_c log( sum_t I[c,t] * psi[t,c] + eps_tol )
// subject to the ball-membership, single-association, window-budget and
// minimum-step constraints.
struct TrajectoryProblem {
  int rounds = 1;                 // T
  SpatialField field;
  Eigen::MatrixXd psi;            // T x C class-distribution table
  double zeta = 0.8;              // association radius scale in (0,1]
  Eigen::VectorXd lambda;         // per-cluster radius scalars (meters)
  double big_m = 0.0;             // 0 -> derived from the ROI diagonal
  double d_min = 5.0;             // minimum displacement between rounds
  int visit_cap = 2;              // per-cluster budget per window
  double eps_tol = 1e-6;
  RoiConfig roi;

  int clusters() const { return field.size(); }
  double ball_radius(int c) const { return zeta * lambda[c]; }
  double effective_big_m() const;
  void validate() const;

  // Radius scalar from the covariance: sqrt of the larger diagonal entry.
  static Eigen::VectorXd lambda_from_field(const SpatialField& field);

  static TrajectoryProblem make(const RoiConfig& roi, const SpatialField& field,
                                const TemporalDistribution& temporal, int rounds);
};

struct Trajectory {
  std::vector<Eigen::Vector2d> positions;  // length T
  Eigen::MatrixXi indicators;              // T x C, binary
  double objective_value = 0.0;

  // Schedule view: associated cluster per round, -1 for none.
  std::vector<int> schedule() const;
};

struct ScaState {
  int iterations = 0;
  std::vector<Eigen::Vector2d> anchors;
  std::vector<double> objective_history;
  double precision = 1e-4;
  int max_iters = 10;
};

struct FeasibilityReport {
  bool binary = true;               // C1
  bool assoc_ball = true;           // C2 at active indicators
  bool single_assoc = true;         // C4
  bool window_budget = true;        // C5
  bool min_step = true;             // C6
  bool indicator_consistent = true; // indicator_rule reproduces indicators
  int exclusion_violations = 0;     // C3 at inactive indicators
  double exclusion_max_violation = 0.0;  // meters

  bool hard_ok() const {
    return binary && assoc_ball && single_assoc && window_budget && min_step &&
           indicator_consistent;
  }
  bool all_ok() const { return hard_ok() && exclusion_violations == 0; }
};

// Association rule: fire for every ball containing q, then keep only the
// nearest center (distance ties break to the lowest cluster index).
Eigen::VectorXi indicator_rule(const Eigen::Vector2d& q,
                               const TrajectoryProblem& problem);

double objective(const Trajectory& traj, const TrajectoryProblem& problem);
double schedule_objective(const std::vector<int>& schedule,
                          const TrajectoryProblem& problem);

// First-order model of ||q - center|| around an anchor, with an eps-damped
// gradient so coincident anchor/center stays finite.
struct AffineMap2 {
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  double constant = 0.0;
  double value(const Eigen::Vector2d& q) const { return gradient.dot(q) + constant; }
};
AffineMap2 linearize_h1(const Eigen::Vector2d& anchor,
                        const Eigen::Vector2d& center, double eps_tol);

// First-order model of ||q_{t+1} - q_t|| around an anchor displacement;
// value(qt, qt1) = gradient . (qt1 - qt) + constant.
struct AffineStep {
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  double constant = 0.0;
  double value(const Eigen::Vector2d& qt, const Eigen::Vector2d& qt1) const {
    return gradient.dot(qt1 - qt) + constant;
  }
};
AffineStep linearize_h2(const Eigen::Vector2d& anchor_t,
                        const Eigen::Vector2d& anchor_t1, double eps_tol);

// One pass of the transformed problem at the given anchors: schedules from a
// beam-pruned dynamic program over {none, cluster 0..C-1} honoring the
// single-association and window budgets, positions from projected local
// search against the linearized exclusion and step constraints.
Trajectory solve_inner(const TrajectoryProblem& problem,
                       const std::vector<Eigen::Vector2d>& anchors);

// Iterative trajectory optimization: re-anchors solve_inner on each solution
// until the objective changes by less than `precision` or max_iters passes.
Trajectory optimize(const TrajectoryProblem& problem,
                    const std::vector<Eigen::Vector2d>& initial_anchors,
                    int max_iters, double precision,
                    ScaState* state = nullptr);

// Exhaustive oracle over all feasible schedules and grid positions. Guarded
// to T <= 6, C <= 3, grid_resolution <= 11.
Trajectory oracle_solve(const TrajectoryProblem& problem, int grid_resolution);

FeasibilityReport check_feasibility(const Trajectory& traj,
                                    const TrajectoryProblem& problem);

// Deterministic anchor generators (circle sweeps and a diagonal line) used to
// start the SCA loop; `variant` selects the pattern.
std::vector<Eigen::Vector2d> default_anchors(const TrajectoryProblem& problem,
                                             int variant = 0);

// Complete C5 windows [t1, t1+C] for t1 = C-1, 2C-1, ...; the trailing
// partial window is unconstrained.
std::vector<std::pair<int, int>> budget_windows(int rounds, int clusters);

}  // namespace aerofl
