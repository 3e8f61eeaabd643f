/*
 * Copyright 2026 The ergosafe authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ERGOSAFE_HARNESS_HPP
#define ERGOSAFE_HARNESS_HPP

#include <atomic>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ergosafe/solver.hpp"
#include "ergosafe/tracker.hpp"

namespace ergosafe {

/// Margin used when sampling start/goal positions: accepted points satisfy
/// h >= this for every obstacle barrier.
inline constexpr double kSampleSafetyMargin = 0.05;

/// Rejection-samples a workspace point with h >= margin for every obstacle
/// barrier (pairwise barriers are skipped; they constrain pairs of robots,
/// not single points). Throws after max_draws consecutive rejections, which
/// signals an over-constrained scene.
template <typename Scalar>
VectorX<Scalar> sampleSafePoint(SplitMix64& rng, const Workspace<Scalar>& ws,
                                const std::vector<DcbfConstraint<Scalar>>& constraints,
                                Scalar margin, Index max_draws = 10000) {
  VectorX<Scalar> w(ws.dim());
  for (Index draw = 0; draw < max_draws; ++draw) {
    for (Index i = 0; i < ws.dim(); ++i) {
      w(i) = Scalar(rng.uniform(0.0, double(ws.extent(i))));
    }
    bool ok = true;
    for (const auto& c : constraints) {
      if (c.isPairwise()) continue;
      if (std::get<Superellipsoid<Scalar>>(c.barrier).value(w) < margin) {
        ok = false;
        break;
      }
    }
    if (ok) return w;
  }
  throw std::runtime_error(
      "sampleSafePoint: no safe point found in " + std::to_string(max_draws) +
      " draws; the scene is over-constrained");
}

/// Minimum barrier value over all states of a path against the obstacle
/// barriers, together with the first time (seconds) each barrier is violated.
template <typename Scalar>
struct PathAudit {
  Scalar min_value = std::numeric_limits<Scalar>::infinity();
  std::vector<std::optional<Scalar>> first_violation_time;
};

template <typename Scalar>
PathAudit<Scalar> auditPath(const std::vector<DcbfConstraint<Scalar>>& constraints,
                            const Trajectory<Scalar>& path,
                            const Dynamics<Scalar>& dynamics) {
  PathAudit<Scalar> audit;
  audit.first_violation_time.assign(constraints.size(), std::nullopt);
  for (Index t = 0; t < path.horizon(); ++t) {
    const VectorX<Scalar> w = dynamics.project(path.states.row(t).transpose());
    for (std::size_t j = 0; j < constraints.size(); ++j) {
      if (constraints[j].isPairwise()) continue;
      const Scalar h =
          std::get<Superellipsoid<Scalar>>(constraints[j].barrier).value(w);
      audit.min_value = std::min(audit.min_value, h);
      if (h < Scalar(0) && !audit.first_violation_time[j].has_value()) {
        audit.first_violation_time[j] = Scalar(t) * path.dt;
      }
    }
  }
  return audit;
}

/// One planning + tracking trial of one mode.
template <typename Scalar>
struct TrialOutcome {
  Index trial = 0;
  InequalityMode mode = InequalityMode::Dcbf;
  VectorX<Scalar> start, goal;   // sampled workspace points
  bool solver_converged = false;
  Scalar plan_metric = Scalar(0);
  Scalar plan_min_h = Scalar(0);
  Scalar executed_min_h = Scalar(0);
  Scalar tracking_rms = Scalar(0);
  bool collided = true;
  bool success = false;
  std::vector<std::optional<Scalar>> first_violation_time;  // per obstacle, s
};

template <typename Scalar>
struct ModeSummary {
  InequalityMode mode = InequalityMode::Dcbf;
  Index trials = 0;
  Index converged = 0;
  Index successes = 0;
  Scalar success_rate = Scalar(0);            // over all trials
  Scalar success_rate_converged = Scalar(0);  // over converged trials
};

template <typename Scalar>
struct MonteCarloResult {
  std::vector<TrialOutcome<Scalar>> trials;  // trial-major, then mode order
  std::vector<ModeSummary<Scalar>> summary;
};

/// Reads the ERGOSAFE_THREADS cap; falls back to the hardware count.
inline Index threadLimit(Index fallback = 0) {
  if (fallback <= 0) {
    fallback = static_cast<Index>(std::thread::hardware_concurrency());
    if (fallback <= 0) fallback = 1;
  }
  if (const char* env = std::getenv("ERGOSAFE_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) return std::min<Index>(fallback, parsed);
  }
  return fallback;
}

namespace detail {

template <typename Scalar>
TrialOutcome<Scalar> runTrial(const ProblemSpec<Scalar>& base,
                              const SolverConfig<Scalar>& cfg,
                              const TrackerConfig<Scalar>& tc, Index trial,
                              InequalityMode mode, Index mode_index,
                              const VectorX<Scalar>& start,
                              const VectorX<Scalar>& goal,
                              std::uint64_t trial_seed) {
  TrialOutcome<Scalar> out;
  out.trial = trial;
  out.mode = mode;
  out.start = start;
  out.goal = goal;

  ProblemSpec<Scalar> spec = base;
  spec.mode = mode;
  spec.start = start;
  spec.goal = goal;

  SolverConfig<Scalar> trial_cfg = cfg;
  trial_cfg.seed =
      SplitMix64::derive(trial_seed, 100 + static_cast<std::uint64_t>(mode_index));
  const Solution<Scalar> sol = solve(spec, trial_cfg);
  out.solver_converged = sol.converged;
  out.plan_metric = sol.metric_value;

  const PathAudit<Scalar> plan_audit =
      auditPath(base.constraints, sol.trajectory, spec.dynamics);
  out.plan_min_h = plan_audit.min_value;

  TrackerConfig<Scalar> trial_tc = tc;
  trial_tc.seed =
      SplitMix64::derive(trial_seed, 200 + static_cast<std::uint64_t>(mode_index));
  const Trajectory<Scalar> executed = track(sol.trajectory, spec.dynamics, trial_tc);

  const PathAudit<Scalar> exec_audit =
      auditPath(base.constraints, executed, spec.dynamics);
  out.executed_min_h = exec_audit.min_value;
  out.first_violation_time = exec_audit.first_violation_time;
  out.collided = exec_audit.min_value < Scalar(0);
  out.tracking_rms = trackingRms(sol.trajectory, executed, spec.dynamics,
                                 trial_tc.feedthrough ? 1 : trial_tc.substeps);
  out.success = out.solver_converged && !out.collided;
  return out;
}

}  // namespace detail

/// Monte-Carlo robustness study: samples start/goal pairs uniformly over the
/// safe set, plans every requested mode on each pair, tracks the plans under
/// PID + actuation noise, and audits collisions on the executed paths. A
/// non-converged solve counts as a failed trial. Per-trial seeds derive from
/// (seed, trial index), so parallel and serial execution give identical
/// results.
template <typename Scalar>
MonteCarloResult<Scalar> runMonteCarlo(const ProblemSpec<Scalar>& base,
                                       const SolverConfig<Scalar>& cfg,
                                       const TrackerConfig<Scalar>& tc,
                                       Index n_trials,
                                       const std::vector<InequalityMode>& modes,
                                       std::uint64_t seed, Index threads = 0) {
  if (n_trials < 1) {
    throw std::invalid_argument("runMonteCarlo: need at least one trial");
  }
  if (modes.empty()) {
    throw std::invalid_argument("runMonteCarlo: need at least one mode");
  }
  base.validate();
  tc.validate();
  if (base.numRobots() != 1 ||
      base.dynamics.state_dim != base.workspace.dim()) {
    throw std::invalid_argument(
        "runMonteCarlo: expects a single-robot problem with workspace states");
  }

  // Sample all start/goal pairs up front (sequential, seed-ordered).
  std::vector<VectorX<Scalar>> starts(n_trials), goals(n_trials);
  for (Index k = 0; k < n_trials; ++k) {
    SplitMix64 rng(SplitMix64::derive(seed, static_cast<std::uint64_t>(k)));
    starts[k] = sampleSafePoint(rng, base.workspace, base.constraints,
                                Scalar(kSampleSafetyMargin));
    goals[k] = sampleSafePoint(rng, base.workspace, base.constraints,
                               Scalar(kSampleSafetyMargin));
  }

  MonteCarloResult<Scalar> result;
  const Index per_trial = static_cast<Index>(modes.size());
  result.trials.resize(n_trials * per_trial);

  const Index workers = std::max<Index>(1, std::min(threadLimit(threads), n_trials));
  std::atomic<Index> next{0};
  auto work = [&]() {
    for (;;) {
      const Index k = next.fetch_add(1);
      if (k >= n_trials) return;
      const std::uint64_t trial_seed =
          SplitMix64::derive(seed, static_cast<std::uint64_t>(k));
      for (Index m = 0; m < per_trial; ++m) {
        result.trials[k * per_trial + m] =
            detail::runTrial(base, cfg, tc, k, modes[m], m, starts[k], goals[k],
                             trial_seed);
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (Index i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  for (Index m = 0; m < per_trial; ++m) {
    ModeSummary<Scalar> s;
    s.mode = modes[m];
    s.trials = n_trials;
    for (Index k = 0; k < n_trials; ++k) {
      const auto& t = result.trials[k * per_trial + m];
      if (t.solver_converged) ++s.converged;
      if (t.success) ++s.successes;
    }
    s.success_rate = Scalar(s.successes) / Scalar(s.trials);
    s.success_rate_converged =
        s.converged > 0 ? Scalar(s.successes) / Scalar(s.converged) : Scalar(0);
    result.summary.push_back(s);
  }
  return result;
}

template <typename Scalar>
struct GammaResult {
  Scalar gamma = Scalar(0);
  Solution<Scalar> solution;
  Scalar metric = Scalar(0);
  Scalar min_h = Scalar(0);  // over the planned path and all obstacle barriers
  bool converged = false;
};

/// Decay-rate sweep: solves the same problem once per gamma from identical
/// initialization (the initial controls do not depend on gamma) and records
/// the ergodic metric and the closest obstacle approach.
template <typename Scalar>
std::vector<GammaResult<Scalar>> runGammaAblation(const ProblemSpec<Scalar>& base,
                                                  const std::vector<Scalar>& gammas,
                                                  const SolverConfig<Scalar>& cfg,
                                                  Index threads = 0) {
  if (gammas.empty()) {
    throw std::invalid_argument("runGammaAblation: empty gamma list");
  }
  for (const Scalar g : gammas) {
    if (!(g > Scalar(0) && g <= Scalar(1))) {
      throw std::invalid_argument("runGammaAblation: gamma must lie in (0, 1]");
    }
  }
  std::vector<GammaResult<Scalar>> out(gammas.size());

  const Index n = static_cast<Index>(gammas.size());
  const Index workers = std::max<Index>(1, std::min(threadLimit(threads), n));
  std::atomic<Index> next{0};
  auto work = [&]() {
    for (;;) {
      const Index i = next.fetch_add(1);
      if (i >= n) return;
      ProblemSpec<Scalar> spec = base;
      spec.mode = InequalityMode::Dcbf;
      for (auto& c : spec.constraints) c.gamma = gammas[i];
      GammaResult<Scalar> r;
      r.gamma = gammas[i];
      r.solution = solve(spec, cfg);
      r.metric = r.solution.metric_value;
      r.min_h = auditPath(spec.constraints, r.solution.trajectory, spec.dynamics)
                    .min_value;
      r.converged = r.solution.converged;
      out[i] = std::move(r);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (Index i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace ergosafe

#endif  // ERGOSAFE_HARNESS_HPP
