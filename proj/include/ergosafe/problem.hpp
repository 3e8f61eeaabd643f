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

#ifndef ERGOSAFE_PROBLEM_HPP
#define ERGOSAFE_PROBLEM_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ergosafe/barrier.hpp"
#include "ergosafe/dynamics.hpp"
#include "ergosafe/ergodic.hpp"
#include "ergosafe/rng.hpp"
#include "ergosafe/trajectory.hpp"
#include "ergosafe/types.hpp"
#include "ergosafe/workspace.hpp"

namespace ergosafe {

/// How barriers enter the optimization.
///  - Dcbf:   residual h(w_{t+1}) - (1-gamma) h(w_t) >= 0 at every step.
///  - PlainH: plain membership h(w_t) >= 0 at every step (baseline).
///  - None:   barriers ignored; only boundary conditions and the workspace
///            bound remain.
enum class InequalityMode { Dcbf, PlainH, None };

inline const char* toString(InequalityMode mode) {
  switch (mode) {
    case InequalityMode::Dcbf: return "sc_eto";
    case InequalityMode::PlainH: return "eto_plain_h";
    case InequalityMode::None: return "none";
  }
  return "unknown";
}

/// One (possibly stacked multi-robot) planning instance.
template <typename Scalar>
struct ProblemSpec {
  ProblemSpec(Dynamics<Scalar> dynamics_in, Workspace<Scalar> workspace_in,
              ErgodicObjective<Scalar> objective_in, VectorX<Scalar> start_in,
              VectorX<Scalar> goal_in, Index horizon_in, Scalar dt_in)
      : dynamics(std::move(dynamics_in)),
        workspace(std::move(workspace_in)),
        objective(std::move(objective_in)),
        control_weight(Scalar(0.01) *
                       MatrixX<Scalar>::Identity(dynamics.control_dim,
                                                 dynamics.control_dim)),
        start(std::move(start_in)),
        goal(std::move(goal_in)),
        horizon(horizon_in),
        dt(dt_in) {}

  Dynamics<Scalar> dynamics;
  Workspace<Scalar> workspace;
  ErgodicObjective<Scalar> objective;
  MatrixX<Scalar> control_weight;  // R
  VectorX<Scalar> start;           // \bar{x}_0
  VectorX<Scalar> goal;            // \bar{x}_f
  std::vector<DcbfConstraint<Scalar>> constraints;
  InequalityMode mode = InequalityMode::Dcbf;
  Index horizon = 0;  // T
  Scalar dt = Scalar(0);

  Index numRobots() const { return objective.numRobots(); }
  Index perRobotWorkspaceDim() const { return workspace.dim(); }
  Index perRobotControlDim() const {
    return dynamics.control_dim / numRobots();
  }

  /// Checks the structural invariants; throws std::invalid_argument with a
  /// message naming the offending field or barrier.
  void validate() const {
    if (horizon < 2) throw std::invalid_argument("ProblemSpec: horizon must be >= 2");
    if (dt <= Scalar(0)) throw std::invalid_argument("ProblemSpec: dt must be positive");
    if (start.size() != dynamics.state_dim || goal.size() != dynamics.state_dim) {
      throw std::invalid_argument("ProblemSpec: boundary state dimension mismatch");
    }
    if (dynamics.workspace_dim != numRobots() * workspace.dim()) {
      throw std::invalid_argument("ProblemSpec: projection dimension mismatch");
    }
    if (dynamics.control_dim % numRobots() != 0) {
      throw std::invalid_argument("ProblemSpec: control dimension not divisible by robot count");
    }
    if (control_weight.rows() != dynamics.control_dim ||
        control_weight.cols() != dynamics.control_dim) {
      throw std::invalid_argument("ProblemSpec: control weight must be m x m");
    }
    const Scalar scale = Scalar(1) + control_weight.cwiseAbs().maxCoeff();
    if ((control_weight - control_weight.transpose()).cwiseAbs().maxCoeff() >
        Scalar(1e-12) * scale) {
      throw std::invalid_argument("ProblemSpec: control weight must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(control_weight);
    if (eig.eigenvalues().minCoeff() < Scalar(-1e-10)) {
      throw std::invalid_argument("ProblemSpec: control weight must be positive semi-definite");
    }
    if (dynamics.bounded()) {
      if (dynamics.control_lower.size() != dynamics.control_dim ||
          dynamics.control_upper.size() != dynamics.control_dim ||
          (dynamics.control_lower.array() >= dynamics.control_upper.array()).any()) {
        throw std::invalid_argument("ProblemSpec: malformed control bounds");
      }
    }

    const Index v = workspace.dim();
    const VectorX<Scalar> w0 = dynamics.project(start);
    const VectorX<Scalar> wf = dynamics.project(goal);
    for (Index r = 0; r < numRobots(); ++r) {
      if (!workspace.contains(w0.segment(r * v, v)) ||
          !workspace.contains(wf.segment(r * v, v))) {
        throw std::invalid_argument(
            "ProblemSpec: boundary state of robot " + std::to_string(r) +
            " projects outside the workspace");
      }
    }
    if (mode != InequalityMode::None) {
      for (std::size_t j = 0; j < constraints.size(); ++j) {
        const auto& c = constraints[j];
        for (const auto* w : {&w0, &wf}) {
          if (c.barrierValue(*w, v) < Scalar(0)) {
            const std::string which = (w == &w0) ? "start" : "goal";
            throw std::invalid_argument(
                "ProblemSpec: " + which + " is unsafe for barrier '" +
                (c.name.empty() ? std::to_string(j) : c.name) + "'");
          }
        }
      }
    }
  }
};

/// Solver knobs. All defaults converge on the shipped scenes within seconds.
template <typename Scalar>
struct SolverConfig {
  Index max_outer = 12;
  Index max_inner = 1000;
  Scalar initial_penalty = Scalar(10);
  Scalar penalty_growth = Scalar(5);
  Scalar armijo = Scalar(1e-4);
  Scalar backtrack = Scalar(0.5);
  Scalar gradient_tolerance = Scalar(1e-4);
  Scalar violation_tolerance = Scalar(1e-6);
  // Terminal-state tolerance; 0 resolves to 1e-3 * min workspace extent.
  Scalar equality_tolerance = Scalar(0);
  // Inequality constraints are tightened by this margin inside the solver so
  // converged iterates satisfy the stated constraints strictly.
  Scalar constraint_margin = Scalar(1e-6);
  // Width (in residual units) of the smooth approximation of the clipped
  // penalty; keeps the subproblems C^2 for the quasi-Newton inner loop.
  // Feasibility checks and multiplier updates always use the exact form.
  Scalar penalty_smoothing = Scalar(1e-5);
  Scalar init_perturbation = Scalar(0.01);  // x min workspace extent
  std::uint64_t seed = 0;

  void validate() const {
    if (max_outer < 1 || max_inner < 1) {
      throw std::invalid_argument("SolverConfig: iteration caps must be >= 1");
    }
    if (initial_penalty <= Scalar(0)) {
      throw std::invalid_argument("SolverConfig: initial penalty must be positive");
    }
    if (penalty_growth <= Scalar(1)) {
      throw std::invalid_argument("SolverConfig: penalty growth must be > 1");
    }
    if (gradient_tolerance <= Scalar(0) || violation_tolerance <= Scalar(0)) {
      throw std::invalid_argument("SolverConfig: tolerances must be positive");
    }
    if (armijo <= Scalar(0) || armijo >= Scalar(1) || backtrack <= Scalar(0) ||
        backtrack >= Scalar(1)) {
      throw std::invalid_argument("SolverConfig: line-search parameters out of range");
    }
    if (constraint_margin < Scalar(0) || init_perturbation < Scalar(0) ||
        penalty_smoothing < Scalar(0)) {
      throw std::invalid_argument("SolverConfig: margins must be non-negative");
    }
  }

  Scalar resolvedEqualityTolerance(const Workspace<Scalar>& ws) const {
    return equality_tolerance > Scalar(0) ? equality_tolerance
                                          : Scalar(1e-3) * ws.minExtent();
  }
};

template <typename Scalar>
struct Solution {
  Trajectory<Scalar> trajectory;
  Scalar objective_value = Scalar(0);  // metric + control effort
  Scalar metric_value = Scalar(0);
  Scalar equality_violation = Scalar(0);
  Scalar inequality_violation = Scalar(0);  // against the unshifted residuals
  Scalar workspace_violation = Scalar(0);
  bool converged = false;
  Index outer_iterations = 0;
  Index inner_iterations = 0;
  double seconds = 0.0;
};

/// Straight-line initial controls from start to goal (exact for integrator
/// dynamics where m == n), plus a seeded zero-mean perturbation of magnitude
/// init_perturbation * min extent. Perturbation streams are drawn per robot
/// so stacked problems stay symmetric under robot relabeling.
template <typename Scalar>
MatrixX<Scalar> initialize(const ProblemSpec<Scalar>& spec,
                           const SolverConfig<Scalar>& cfg) {
  const Index steps = spec.horizon - 1;
  MatrixX<Scalar> controls = MatrixX<Scalar>::Zero(steps, spec.dynamics.control_dim);
  if (spec.dynamics.control_dim == spec.dynamics.state_dim) {
    const VectorX<Scalar> u =
        (spec.goal - spec.start) / (Scalar(steps) * spec.dt);
    controls.rowwise() = u.transpose();
  }
  const Scalar mag = cfg.init_perturbation * spec.workspace.minExtent();
  if (mag > Scalar(0)) {
    const Index mr = spec.perRobotControlDim();
    for (Index r = 0; r < spec.numRobots(); ++r) {
      SplitMix64 rng(SplitMix64::derive(cfg.seed, static_cast<std::uint64_t>(r)));
      for (Index t = 0; t < steps; ++t) {
        for (Index i = 0; i < mr; ++i) {
          controls(t, r * mr + i) += mag * Scalar(rng.symmetric());
        }
      }
    }
  }
  return controls;
}

namespace detail {

/// sum_r dot(a_r, b_r) over per-robot column blocks; robot partials are
/// combined after the per-block reductions so two-robot relabelings commute
/// bit-exactly.
template <typename Scalar>
Scalar blockDot(const MatrixX<Scalar>& a, const MatrixX<Scalar>& b,
                Index num_robots) {
  const Index cols_per = a.cols() / num_robots;
  Scalar total = Scalar(0);
  for (Index r = 0; r < num_robots; ++r) {
    total += a.middleCols(r * cols_per, cols_per)
                 .cwiseProduct(b.middleCols(r * cols_per, cols_per))
                 .sum();
  }
  return total;
}

template <typename Scalar>
Scalar blockSegmentDot(const VectorX<Scalar>& a, const VectorX<Scalar>& b,
                       Index num_robots) {
  const Index per = a.size() / num_robots;
  Scalar total = Scalar(0);
  for (Index r = 0; r < num_robots; ++r) {
    total += a.segment(r * per, per).dot(b.segment(r * per, per));
  }
  return total;
}

}  // namespace detail

/// Control-effort term sum_t u_t^T R u_t * dt.
template <typename Scalar>
Scalar controlEffort(const ProblemSpec<Scalar>& spec,
                     const MatrixRef<Scalar>& controls) {
  Scalar total = Scalar(0);
  const Index N = spec.numRobots();
  for (Index t = 0; t < controls.rows(); ++t) {
    const VectorX<Scalar> u = controls.row(t).transpose();
    const VectorX<Scalar> ru = spec.control_weight * u;
    total += detail::blockSegmentDot(u, ru, N);
  }
  return total * spec.dt;
}

/// The true objective E(x, phi) + sum_t u_t^T R u_t * dt for given controls.
template <typename Scalar>
Scalar objectiveValue(const ProblemSpec<Scalar>& spec,
                      const MatrixRef<Scalar>& controls) {
  const Trajectory<Scalar> traj =
      rollout(spec.dynamics, spec.start, controls, spec.dt);
  return spec.objective.metric(traj) + controlEffort(spec, controls);
}

}  // namespace ergosafe

#endif  // ERGOSAFE_PROBLEM_HPP
