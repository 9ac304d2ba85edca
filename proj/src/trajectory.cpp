// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#include "aerofl/trajectory.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <stdexcept>

namespace aerofl {

namespace {

constexpr int kBeamWidth = 160;
constexpr int kMaxCandidates = 40;
constexpr int kMaxSweeps = 48;
constexpr int kRelinPasses = 6;
constexpr int kPocsIters = 30;
constexpr double kCheckTol = 1e-9;

double log_term(double s, double eps) { return std::log(s + eps); }

// Schedule representation: associated cluster per round, -1 for none.
using Schedule = std::vector<int>;

bool windows_ok(const Schedule& schedule, const TrajectoryProblem& problem) {
  for (const auto& [lo, hi] : budget_windows(problem.rounds, problem.clusters())) {
    std::vector<int> counts(problem.clusters(), 0);
    for (int t = lo; t <= hi; ++t)
      if (schedule[t] >= 0 && ++counts[schedule[t]] > problem.visit_cap)
        return false;
  }
  return true;
}

Eigen::MatrixXi schedule_to_indicators(const Schedule& schedule, int clusters) {
  Eigen::MatrixXi ind =
      Eigen::MatrixXi::Zero(static_cast<int>(schedule.size()), clusters);
  for (int t = 0; t < static_cast<int>(schedule.size()); ++t)
    if (schedule[t] >= 0) ind(t, schedule[t]) = 1;
  return ind;
}

// ---------------------------------------------------------------------------
// Schedule search: beam-pruned DP over per-round association choices.

struct BeamEntry {
  Schedule schedule;
  Eigen::VectorXd accum;  // per-cluster sum of associated psi mass
  double partial = 0.0;
  std::array<int, 2> win = {-1, -1};
  std::array<std::vector<std::uint8_t>, 2> counts;
};

std::vector<Schedule> beam_schedules(const TrajectoryProblem& problem,
                                     int max_candidates) {
  const int rounds = problem.rounds;
  const int clusters = problem.clusters();
  const auto windows = budget_windows(rounds, clusters);
  std::vector<int> starts_at(rounds, -1), ends_at(rounds, -1);
  for (int w = 0; w < static_cast<int>(windows.size()); ++w) {
    starts_at[windows[w].first] = w;
    ends_at[windows[w].second] = w;
  }

  BeamEntry root;
  root.accum = Eigen::VectorXd::Zero(clusters);
  root.partial = clusters * log_term(0.0, problem.eps_tol);
  std::vector<BeamEntry> beam{root};

  for (int t = 0; t < rounds; ++t) {
    std::vector<BeamEntry> next;
    next.reserve(beam.size() * (clusters + 1));
    for (auto& entry : beam) {
      if (starts_at[t] >= 0) {
        const int slot = entry.win[0] < 0 ? 0 : 1;
        entry.win[slot] = starts_at[t];
        entry.counts[slot].assign(clusters, 0);
      }
      for (int choice = -1; choice < clusters; ++choice) {
        if (choice >= 0) {
          bool over = false;
          for (int i = 0; i < 2 && !over; ++i)
            if (entry.win[i] >= 0 &&
                entry.counts[i][choice] + 1 > problem.visit_cap)
              over = true;
          if (over) continue;
        }
        BeamEntry child = entry;
        child.schedule.push_back(choice);
        if (choice >= 0) {
          for (int i = 0; i < 2; ++i)
            if (child.win[i] >= 0) ++child.counts[i][choice];
          const double before = log_term(child.accum[choice], problem.eps_tol);
          child.accum[choice] += problem.psi(t, choice);
          child.partial +=
              log_term(child.accum[choice], problem.eps_tol) - before;
        }
        if (ends_at[t] >= 0) {
          for (int i = 0; i < 2; ++i)
            if (child.win[i] == ends_at[t]) {
              child.win[i] = -1;
              child.counts[i].clear();
            }
        }
        next.push_back(std::move(child));
      }
    }
    std::stable_sort(next.begin(), next.end(),
                     [](const BeamEntry& a, const BeamEntry& b) {
                       return a.partial > b.partial;
                     });
    if (static_cast<int>(next.size()) > kBeamWidth) next.resize(kBeamWidth);
    beam = std::move(next);
  }

  std::vector<Schedule> out;
  for (const auto& entry : beam) {
    out.push_back(entry.schedule);
    if (static_cast<int>(out.size()) >= max_candidates) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Position search: projected local search against the linearized exclusion
// and step constraints, anchored at the current SCA iterate.

struct HalfPlane {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  double b = 0.0;  // constraint g . q >= b
  bool ok = true;  // false when the linearization is degenerate

  void project(Eigen::Vector2d& q) const {
    const double gap = b - g.dot(q);
    if (gap > 0.0) q += g * (gap / g.squaredNorm());
  }
  bool satisfied(const Eigen::Vector2d& q, double tol) const {
    return g.dot(q) >= b - tol;
  }
};

struct RoundConstraints {
  int assoc = -1;
  std::vector<HalfPlane> exclusions;
  bool degenerate = false;
};

void clamp_to_roi(Eigen::Vector2d& q, const RoiConfig& roi) {
  q.x() = std::clamp(q.x(), -0.5 * roi.width, 0.5 * roi.width);
  q.y() = std::clamp(q.y(), -0.5 * roi.height, 0.5 * roi.height);
}

void project_into_ball(Eigen::Vector2d& q, const Eigen::Vector2d& center,
                       double radius) {
  const Eigen::Vector2d d = q - center;
  const double n = d.norm();
  if (n > radius) q = center + d * (radius / n);
}

std::optional<std::vector<Eigen::Vector2d>> position_search(
    const Schedule& schedule, const std::vector<Eigen::Vector2d>& anchors,
    const TrajectoryProblem& problem) {
  const int rounds = problem.rounds;
  const int clusters = problem.clusters();
  const double eps = problem.eps_tol;
  const double diag = problem.roi.diagonal();
  const double m_excl_base = 1e-3;
  const bool use_steps = problem.d_min > 0.0 && rounds > 1;
  const double m_step =
      use_steps ? 1e-3 + 4.0 * eps * diag / (problem.d_min + eps) : 0.0;

  std::vector<RoundConstraints> cons(rounds);
  std::vector<AffineStep> steps(use_steps ? rounds - 1 : 0);

  // (Re)builds the linearized exclusion and step constraints around the
  // given linearization points. Returns false when some exclusion is
  // degenerate (linearization point on the excluded center).
  const auto linearize_at = [&](const std::vector<Eigen::Vector2d>& at) {
    bool ok = true;
    for (int t = 0; t < rounds; ++t) {
      cons[t].assoc = schedule[t];
      cons[t].exclusions.clear();
      cons[t].degenerate = false;
      for (int c = 0; c < clusters; ++c) {
        if (c == schedule[t]) continue;
        const AffineMap2 h1 =
            linearize_h1(at[t], problem.field.clusters[c].mean, eps);
        const double radius = problem.ball_radius(c);
        const double margin = m_excl_base + 2.0 * eps * diag / (radius + eps);
        HalfPlane hp;
        hp.g = h1.gradient;
        hp.b = radius + margin - h1.constant;
        if (hp.g.norm() < 1e-12) {
          if (hp.b > 0.0) {
            cons[t].degenerate = true;
            ok = false;
          }
          continue;
        }
        cons[t].exclusions.push_back(hp);
      }
    }
    if (use_steps) {
      for (int t = 0; t + 1 < rounds; ++t) {
        const AffineStep step = linearize_h2(at[t], at[t + 1], eps);
        // keep the previous direction when the points coincide
        if (step.gradient.norm() > 1e-12) steps[t] = step;
      }
    }
    return ok;
  };

  // Initial guess: for associated rounds start inside the ball, pushed away
  // from overlapping foreign balls so exclusion constraints have room; for
  // free rounds start from the anchor.
  std::vector<Eigen::Vector2d> q(anchors.begin(), anchors.begin() + rounds);
  for (int t = 0; t < rounds; ++t) {
    const int a = schedule[t];
    if (a >= 0) {
      const Eigen::Vector2d& mu = problem.field.clusters[a].mean;
      const double radius = problem.ball_radius(a);
      Eigen::Vector2d away = Eigen::Vector2d::Zero();
      for (int c = 0; c < clusters; ++c) {
        if (c == a) continue;
        const Eigen::Vector2d sep = mu - problem.field.clusters[c].mean;
        if (sep.norm() < radius + problem.ball_radius(c))
          away += sep.norm() > 1e-12
                      ? (sep / sep.norm()).eval()
                      : Eigen::Vector2d(std::cos(2.0 * M_PI * t / rounds),
                                        std::sin(2.0 * M_PI * t / rounds));
      }
      if (away.norm() > 1e-12) {
        q[t] = mu + 0.6 * radius * away / away.norm();
      } else if ((q[t] - mu).norm() > radius) {
        q[t] = mu;
      }
    }
    clamp_to_roi(q[t], problem.roi);
  }

  // First pass linearizes at the SCA anchors; failed passes re-linearize at
  // the current iterate (feasibility restoration).
  linearize_at(anchors);

  auto project_round = [&](int t) {
    const int a = cons[t].assoc;
    for (int iter = 0; iter < kPocsIters; ++iter) {
      for (const auto& hp : cons[t].exclusions) hp.project(q[t]);
      if (use_steps) {
        if (t + 1 < rounds) {
          const auto& st = steps[t];
          // st.g . (q[t+1] - q[t]) + st.c >= d_min + m, with q[t+1] fixed.
          HalfPlane hp{-st.gradient, problem.d_min + m_step - st.constant -
                                  st.gradient.dot(q[t + 1])};
          if (hp.g.squaredNorm() > 1e-24) hp.project(q[t]);
        }
        if (t > 0) {
          const auto& st = steps[t - 1];
          HalfPlane hp{st.gradient, problem.d_min + m_step - st.constant +
                                 st.gradient.dot(q[t - 1])};
          if (hp.g.squaredNorm() > 1e-24) hp.project(q[t]);
        }
      }
      if (a >= 0)
        project_into_ball(q[t], problem.field.clusters[a].mean,
                          problem.ball_radius(a));
      clamp_to_roi(q[t], problem.roi);
    }
  };

  const Eigen::MatrixXi want_ind = schedule_to_indicators(schedule, clusters);
  auto exact_ok = [&]() {
    for (int t = 0; t < rounds; ++t) {
      if (indicator_rule(q[t], problem) != want_ind.row(t).transpose())
        return false;
      if (schedule[t] >= 0) {
        const double dist =
            (q[t] - problem.field.clusters[schedule[t]].mean).norm();
        if (dist > problem.ball_radius(schedule[t]) + kCheckTol) return false;
      }
      if (use_steps && t + 1 < rounds &&
          (q[t + 1] - q[t]).norm() < problem.d_min - kCheckTol)
        return false;
    }
    return true;
  };

  for (int pass = 0; pass < kRelinPasses; ++pass) {
    for (int sweep = 0; sweep < kMaxSweeps / kRelinPasses; ++sweep) {
      for (int t = 0; t < rounds; ++t) project_round(t);
      for (int t = rounds - 1; t >= 0; --t) project_round(t);
      if (exact_ok()) return q;
    }
    linearize_at(q);
  }
  return std::nullopt;
}

Trajectory build_trajectory(const Schedule& schedule,
                            std::vector<Eigen::Vector2d> positions,
                            const TrajectoryProblem& problem) {
  Trajectory traj;
  traj.positions = std::move(positions);
  traj.indicators = schedule_to_indicators(schedule, problem.clusters());
  traj.objective_value = schedule_objective(schedule, problem);
  return traj;
}

// ---------------------------------------------------------------------------
// Oracle helpers.

struct Grid {
  std::vector<Eigen::Vector2d> points;
};

Grid make_grid(const RoiConfig& roi, int res) {
  Grid grid;
  grid.points.reserve(res * res);
  for (int iy = 0; iy < res; ++iy)
    for (int ix = 0; ix < res; ++ix) {
      const double fx = res == 1 ? 0.5 : static_cast<double>(ix) / (res - 1);
      const double fy = res == 1 ? 0.5 : static_cast<double>(iy) / (res - 1);
      grid.points.emplace_back((fx - 0.5) * roi.width, (fy - 0.5) * roi.height);
    }
  return grid;
}

}  // namespace

std::vector<std::pair<int, int>> budget_windows(int rounds, int clusters) {
  std::vector<std::pair<int, int>> windows;
  for (int t1 = clusters - 1; t1 + clusters <= rounds - 1; t1 += clusters)
    windows.emplace_back(t1, t1 + clusters);
  return windows;
}

double TrajectoryProblem::effective_big_m() const {
  if (big_m > 0.0) return big_m;
  return roi.diagonal() + (zeta * lambda.array()).maxCoeff();
}

void TrajectoryProblem::validate() const {
  if (rounds < 1) throw std::invalid_argument("trajectory: rounds must be >= 1");
  if (!(zeta > 0.0 && zeta <= 1.0))
    throw std::invalid_argument("trajectory: zeta must lie in (0,1]");
  if (d_min < 0.0) throw std::invalid_argument("trajectory: d_min negative");
  if (visit_cap < 0) throw std::invalid_argument("trajectory: visit_cap negative");
  if (eps_tol <= 0.0) throw std::invalid_argument("trajectory: eps_tol must be positive");
  if (lambda.size() != clusters())
    throw std::invalid_argument("trajectory: lambda size mismatch");
  if (psi.rows() != rounds || psi.cols() != clusters())
    throw std::invalid_argument("trajectory: psi table shape mismatch");
  if (effective_big_m() <= (zeta * lambda.array()).maxCoeff())
    throw std::invalid_argument("trajectory: big M must exceed zeta*lambda");
}

Eigen::VectorXd TrajectoryProblem::lambda_from_field(const SpatialField& field) {
  Eigen::VectorXd lambda(field.size());
  for (int c = 0; c < field.size(); ++c) {
    const auto& cov = field.clusters[c].covariance;
    lambda[c] = std::sqrt(std::max(cov(0, 0), cov(1, 1)));
  }
  return lambda;
}

TrajectoryProblem TrajectoryProblem::make(const RoiConfig& roi,
                                          const SpatialField& field,
                                          const TemporalDistribution& temporal,
                                          int rounds) {
  TrajectoryProblem p;
  p.rounds = rounds;
  p.field = field;
  p.psi = class_distribution_table(temporal, rounds);
  p.lambda = lambda_from_field(field);
  p.roi = roi;
  return p;
}

std::vector<int> Trajectory::schedule() const {
  std::vector<int> s(indicators.rows(), -1);
  for (int t = 0; t < indicators.rows(); ++t)
    for (int c = 0; c < indicators.cols(); ++c)
      if (indicators(t, c) != 0) s[t] = c;
  return s;
}

Eigen::VectorXi indicator_rule(const Eigen::Vector2d& q,
                               const TrajectoryProblem& problem) {
  const int clusters = problem.clusters();
  Eigen::VectorXi ind = Eigen::VectorXi::Zero(clusters);
  int best = -1;
  double best_dist = 0.0;
  for (int c = 0; c < clusters; ++c) {
    const double dist = (q - problem.field.clusters[c].mean).norm();
    if (dist <= problem.ball_radius(c) && (best < 0 || dist < best_dist)) {
      best = c;
      best_dist = dist;
    }
  }
  if (best >= 0) ind[best] = 1;
  return ind;
}

double schedule_objective(const std::vector<int>& schedule,
                          const TrajectoryProblem& problem) {
  Eigen::VectorXd accum = Eigen::VectorXd::Zero(problem.clusters());
  for (int t = 0; t < static_cast<int>(schedule.size()); ++t)
    if (schedule[t] >= 0) accum[schedule[t]] += problem.psi(t, schedule[t]);
  double obj = 0.0;
  for (int c = 0; c < problem.clusters(); ++c)
    obj += log_term(accum[c], problem.eps_tol);
  return obj;
}

double objective(const Trajectory& traj, const TrajectoryProblem& problem) {
  return schedule_objective(traj.schedule(), problem);
}

AffineMap2 linearize_h1(const Eigen::Vector2d& anchor,
                        const Eigen::Vector2d& center, double eps_tol) {
  const Eigen::Vector2d d = anchor - center;
  const double n = d.norm();
  AffineMap2 map;
  map.gradient = d / (n + eps_tol);
  map.constant = n - map.gradient.dot(anchor);
  return map;
}

AffineStep linearize_h2(const Eigen::Vector2d& anchor_t,
                        const Eigen::Vector2d& anchor_t1, double eps_tol) {
  const Eigen::Vector2d delta = anchor_t1 - anchor_t;
  const double n = delta.norm();
  AffineStep step;
  step.gradient = delta / (n + eps_tol);
  step.constant = n - step.gradient.dot(delta);
  return step;
}

Trajectory solve_inner(const TrajectoryProblem& problem,
                       const std::vector<Eigen::Vector2d>& anchors) {
  problem.validate();
  if (static_cast<int>(anchors.size()) < problem.rounds)
    throw std::invalid_argument("solve_inner: anchor list shorter than rounds");

  std::vector<Schedule> candidates = beam_schedules(problem, kMaxCandidates);

  // The anchors' own rule schedule is always a candidate, so re-anchoring a
  // feasible solution can never lose it.
  Schedule anchor_schedule(problem.rounds, -1);
  for (int t = 0; t < problem.rounds; ++t) {
    const Eigen::VectorXi ind = indicator_rule(anchors[t], problem);
    for (int c = 0; c < problem.clusters(); ++c)
      if (ind[c] != 0) anchor_schedule[t] = c;
  }
  if (windows_ok(anchor_schedule, problem)) candidates.push_back(anchor_schedule);

  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const Schedule& a, const Schedule& b) {
                     return schedule_objective(a, problem) >
                            schedule_objective(b, problem);
                   });
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  // Last resort: the empty association is feasible whenever the vehicle can
  // roam outside every ball, so heavily overlapping fields still solve.
  const Schedule all_none(problem.rounds, -1);
  if (std::find(candidates.begin(), candidates.end(), all_none) ==
      candidates.end())
    candidates.push_back(all_none);

  for (const auto& schedule : candidates) {
    auto positions = position_search(schedule, anchors, problem);
    if (positions)
      return build_trajectory(schedule, std::move(*positions), problem);
  }
  throw std::runtime_error(
      "solve_inner: no candidate schedule admits feasible positions "
      "(d_min may be too large for the region)");
}

Trajectory optimize(const TrajectoryProblem& problem,
                    const std::vector<Eigen::Vector2d>& initial_anchors,
                    int max_iters, double precision, ScaState* state) {
  if (max_iters < 1) throw std::invalid_argument("optimize: max_iters must be >= 1");
  if (precision <= 0.0) throw std::invalid_argument("optimize: precision must be positive");

  std::vector<Eigen::Vector2d> anchors = initial_anchors;
  std::optional<Trajectory> best;
  std::vector<double> history;
  int iters = 0;
  for (int j = 0; j < max_iters; ++j) {
    Trajectory traj = solve_inner(problem, anchors);
    if (best && traj.objective_value < best->objective_value) traj = *best;
    history.push_back(traj.objective_value);
    anchors = traj.positions;
    best = std::move(traj);
    iters = j + 1;
    if (j > 0 && std::abs(history[j] - history[j - 1]) < precision) break;
  }

  if (state) {
    state->iterations = iters;
    state->anchors = anchors;
    state->objective_history = history;
    state->precision = precision;
    state->max_iters = max_iters;
  }

  const FeasibilityReport report = check_feasibility(*best, problem);
  if (!report.hard_ok())
    throw std::runtime_error("optimize: returned trajectory violates a hard constraint");
  return *best;
}

Trajectory oracle_solve(const TrajectoryProblem& problem, int grid_resolution) {
  problem.validate();
  if (problem.rounds > 6 || problem.clusters() > 3 || grid_resolution > 11)
    throw std::invalid_argument(
        "oracle_solve: instance exceeds the size guard (T <= 6, C <= 3, "
        "grid <= 11x11)");
  if (grid_resolution < 1)
    throw std::invalid_argument("oracle_solve: grid_resolution must be >= 1");

  const int rounds = problem.rounds;
  const int clusters = problem.clusters();
  const Grid grid = make_grid(problem.roi, grid_resolution);
  const int npts = static_cast<int>(grid.points.size());

  // Feasible point set per choice under exact C2/C3: inside the associated
  // ball, strictly outside every other ball (which also keeps the rule
  // indicator consistent with the choice).
  std::vector<std::bitset<128>> choice_set(clusters + 1);
  for (int i = 0; i < npts; ++i) {
    bool outside_all = true;
    int inside = -1;
    int inside_count = 0;
    for (int c = 0; c < clusters; ++c) {
      const double dist = (grid.points[i] - problem.field.clusters[c].mean).norm();
      if (dist <= problem.ball_radius(c)) {
        outside_all = false;
        inside = c;
        ++inside_count;
      }
    }
    if (outside_all) choice_set[0].set(i);
    if (inside_count == 1) choice_set[inside + 1].set(i);
  }

  std::vector<std::bitset<128>> adj(npts);
  for (int i = 0; i < npts; ++i)
    for (int j = 0; j < npts; ++j)
      if ((grid.points[i] - grid.points[j]).norm() >= problem.d_min)
        adj[i].set(j);

  // Enumerate all C4/C5-feasible schedules, best objective first.
  std::vector<std::pair<double, Schedule>> ranked;
  Schedule schedule(rounds, -1);
  const std::int64_t total = static_cast<std::int64_t>(
      std::pow(static_cast<double>(clusters + 1), rounds) + 0.5);
  for (std::int64_t code = 0; code < total; ++code) {
    std::int64_t x = code;
    for (int t = 0; t < rounds; ++t) {
      schedule[t] = static_cast<int>(x % (clusters + 1)) - 1;
      x /= clusters + 1;
    }
    if (!windows_ok(schedule, problem)) continue;
    ranked.emplace_back(schedule_objective(schedule, problem), schedule);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  for (const auto& [obj, sched] : ranked) {
    std::vector<std::bitset<128>> reach(rounds);
    reach[0] = choice_set[sched[0] + 1];
    bool dead = reach[0].none();
    for (int t = 1; t < rounds && !dead; ++t) {
      std::bitset<128> next;
      for (int i = 0; i < npts; ++i)
        if (reach[t - 1].test(i)) next |= adj[i];
      reach[t] = next & choice_set[sched[t] + 1];
      dead = reach[t].none();
    }
    if (dead) continue;

    // Backtrack a witness path, lowest point index first.
    std::vector<Eigen::Vector2d> positions(rounds);
    int cur = 0;
    while (!reach[rounds - 1].test(cur)) ++cur;
    positions[rounds - 1] = grid.points[cur];
    for (int t = rounds - 2; t >= 0; --t) {
      for (int i = 0; i < npts; ++i) {
        if (reach[t].test(i) && adj[i].test(cur)) {
          cur = i;
          break;
        }
      }
      positions[t] = grid.points[cur];
    }
    return build_trajectory(sched, std::move(positions), problem);
  }
  throw std::runtime_error("oracle_solve: no feasible schedule on the grid");
}

FeasibilityReport check_feasibility(const Trajectory& traj,
                                    const TrajectoryProblem& problem) {
  FeasibilityReport report;
  const int rounds = problem.rounds;
  const int clusters = problem.clusters();

  for (int t = 0; t < rounds; ++t) {
    int active = 0;
    for (int c = 0; c < clusters; ++c) {
      const int v = traj.indicators(t, c);
      if (v != 0 && v != 1) report.binary = false;
      active += v != 0 ? 1 : 0;
      const double dist = (traj.positions[t] - problem.field.clusters[c].mean).norm();
      if (v == 1 && dist > problem.ball_radius(c) + kCheckTol)
        report.assoc_ball = false;
      if (v == 0 && dist < problem.ball_radius(c) - kCheckTol) {
        ++report.exclusion_violations;
        report.exclusion_max_violation = std::max(
            report.exclusion_max_violation, problem.ball_radius(c) - dist);
      }
    }
    if (active > 1) report.single_assoc = false;
    if (indicator_rule(traj.positions[t], problem) !=
        traj.indicators.row(t).transpose())
      report.indicator_consistent = false;
  }

  const auto sched = traj.schedule();
  if (!windows_ok(sched, problem)) report.window_budget = false;

  for (int t = 0; t + 1 < rounds; ++t)
    if ((traj.positions[t + 1] - traj.positions[t]).norm() <
        problem.d_min - kCheckTol)
      report.min_step = false;

  return report;
}

std::vector<Eigen::Vector2d> default_anchors(const TrajectoryProblem& problem,
                                             int variant) {
  const double side = std::min(problem.roi.width, problem.roi.height);
  const double frac = variant == 1 ? 0.20 : variant == 2 ? 0.40 : 0.30;
  const double radius =
      std::clamp(frac * side, 0.7 * problem.d_min + 1e-6, 0.45 * side);
  const double phase = variant * M_PI / 2;
  const double dir = variant == 1 ? -1.0 : 1.0;

  double step = 2.0 * M_PI / std::max(problem.rounds, 2);
  if (problem.d_min > 0.0) {
    const double chord = std::min(1.0, 1.25 * problem.d_min / (2.0 * radius));
    step = std::max(step, 2.0 * std::asin(chord));
  }

  std::vector<Eigen::Vector2d> anchors(problem.rounds);
  for (int t = 0; t < problem.rounds; ++t) {
    const double a = phase + dir * step * t;
    anchors[t] = Eigen::Vector2d(radius * std::cos(a), radius * std::sin(a));
  }
  return anchors;
}

}  // namespace aerofl
