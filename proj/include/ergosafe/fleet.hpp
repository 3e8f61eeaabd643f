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

#ifndef ERGOSAFE_FLEET_HPP
#define ERGOSAFE_FLEET_HPP

#include <string>
#include <utility>
#include <vector>

#include "ergosafe/problem.hpp"
#include "ergosafe/solver.hpp"

namespace ergosafe {

/// N single-robot problems sharing one workspace, measure and horizon, plus
/// the inter-robot minimum-distance constraints.
template <typename Scalar>
struct FleetSpec {
  std::vector<ProblemSpec<Scalar>> robots;
  std::vector<DcbfConstraint<Scalar>> pairwise;

  Index size() const { return static_cast<Index>(robots.size()); }

  void validate() const {
    if (robots.empty()) {
      throw std::invalid_argument("FleetSpec: need at least one robot");
    }
    const auto& first = robots.front();
    for (std::size_t r = 0; r < robots.size(); ++r) {
      const auto& p = robots[r];
      if (p.numRobots() != 1) {
        throw std::invalid_argument("FleetSpec: member specs must be single-robot");
      }
      if (p.horizon != first.horizon || p.dt != first.dt) {
        throw std::invalid_argument("FleetSpec: robots must share horizon and dt");
      }
      if (p.workspace.dim() != first.workspace.dim() ||
          p.workspace.extents() != first.workspace.extents()) {
        throw std::invalid_argument("FleetSpec: robots must share the workspace");
      }
      if (p.objective.basis().modesPerDim() != first.objective.basis().modesPerDim() ||
          p.objective.target() != first.objective.target()) {
        throw std::invalid_argument("FleetSpec: robots must share the target measure");
      }
      if (p.mode != first.mode) {
        throw std::invalid_argument("FleetSpec: robots must share the inequality mode");
      }
    }
    for (const auto& c : pairwise) {
      if (!c.isPairwise()) {
        throw std::invalid_argument("FleetSpec: pairwise list holds a non-pairwise barrier");
      }
      const auto& pb = std::get<PairwiseBarrier<Scalar>>(c.barrier);
      if (pb.robotI() >= size() || pb.robotJ() >= size()) {
        throw std::invalid_argument("FleetSpec: pairwise barrier names a missing robot");
      }
    }
  }
};

/// All N(N-1)/2 pairs at a common separation and decay rate.
template <typename Scalar>
std::vector<DcbfConstraint<Scalar>> fullConnectivity(Index num_robots,
                                                     Scalar min_separation,
                                                     Scalar gamma) {
  std::vector<DcbfConstraint<Scalar>> out;
  for (Index i = 0; i < num_robots; ++i) {
    for (Index j = i + 1; j < num_robots; ++j) {
      out.emplace_back(PairwiseBarrier<Scalar>(i, j, min_separation), gamma,
                       "pair_" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  return out;
}

/// Assembles the joint problem: block-diagonal dynamics, pooled ergodic
/// objective over all robots' visits, per-robot obstacle barriers, and the
/// inter-robot barriers on the stacked workspace point.
template <typename Scalar>
ProblemSpec<Scalar> stack(const FleetSpec<Scalar>& fleet) {
  fleet.validate();
  const Index N = fleet.size();
  const auto& first = fleet.robots.front();

  std::vector<Dynamics<Scalar>> parts;
  parts.reserve(N);
  for (const auto& p : fleet.robots) parts.push_back(p.dynamics);
  Dynamics<Scalar> joint_dynamics = stackDynamics(parts);

  ErgodicObjective<Scalar> joint_objective(
      first.objective.basis(), first.objective.target(), joint_dynamics.project,
      joint_dynamics.project_pullback, N);

  VectorX<Scalar> start(joint_dynamics.state_dim), goal(joint_dynamics.state_dim);
  MatrixX<Scalar> weight =
      MatrixX<Scalar>::Zero(joint_dynamics.control_dim, joint_dynamics.control_dim);
  Index xoff = 0, uoff = 0;
  for (const auto& p : fleet.robots) {
    start.segment(xoff, p.dynamics.state_dim) = p.start;
    goal.segment(xoff, p.dynamics.state_dim) = p.goal;
    weight.block(uoff, uoff, p.dynamics.control_dim, p.dynamics.control_dim) =
        p.control_weight;
    xoff += p.dynamics.state_dim;
    uoff += p.dynamics.control_dim;
  }

  ProblemSpec<Scalar> joint(std::move(joint_dynamics), first.workspace,
                            std::move(joint_objective), std::move(start),
                            std::move(goal), first.horizon, first.dt);
  joint.control_weight = std::move(weight);
  joint.mode = first.mode;

  for (Index r = 0; r < N; ++r) {
    for (const auto& c : fleet.robots[r].constraints) {
      DcbfConstraint<Scalar> copy = c;
      copy.robot = r;
      copy.name = "r" + std::to_string(r) + "/" +
                  (c.name.empty() ? "obstacle" : c.name);
      joint.constraints.push_back(std::move(copy));
    }
  }
  for (const auto& c : fleet.pairwise) {
    joint.constraints.push_back(c);
  }
  return joint;
}

/// Splits a joint solution back into per-robot solutions. The scalar fields
/// (objective, metric, violations, convergence) describe the joint problem
/// and are replicated on every robot's entry.
template <typename Scalar>
std::vector<Solution<Scalar>> unstackSolution(const FleetSpec<Scalar>& fleet,
                                              const Solution<Scalar>& joint) {
  std::vector<Solution<Scalar>> out;
  out.reserve(fleet.robots.size());
  Index xoff = 0, uoff = 0;
  for (const auto& p : fleet.robots) {
    Solution<Scalar> s = joint;
    s.trajectory.states =
        joint.trajectory.states.middleCols(xoff, p.dynamics.state_dim);
    s.trajectory.controls =
        joint.trajectory.controls.middleCols(uoff, p.dynamics.control_dim);
    out.push_back(std::move(s));
    xoff += p.dynamics.state_dim;
    uoff += p.dynamics.control_dim;
  }
  return out;
}

/// Solves the stacked problem and unstacks the result.
template <typename Scalar>
std::vector<Solution<Scalar>> solveFleet(const FleetSpec<Scalar>& fleet,
                                         const SolverConfig<Scalar>& cfg) {
  const ProblemSpec<Scalar> joint = stack(fleet);
  return unstackSolution(fleet, solve(joint, cfg));
}

}  // namespace ergosafe

#endif  // ERGOSAFE_FLEET_HPP
