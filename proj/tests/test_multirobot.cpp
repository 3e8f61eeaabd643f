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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ergosafe/fleet.hpp"
#include "scenes.hpp"
#include "testing_utils.hpp"

using namespace ergosafe;
using testing::v2;

namespace {

FleetSpec<double> twoRobotFleet(double d_min = 0.08, bool with_obstacles = true,
                                Index horizon = 40) {
  const auto obstacles = with_obstacles
                             ? testing::threeObstacles()
                             : std::vector<Superellipsoid<double>>{};
  FleetSpec<double> fleet;
  fleet.robots.push_back(testing::boxProblem(obstacles, 0.5, v2(0.06, 0.06),
                                             v2(0.94, 0.94), horizon));
  fleet.robots.push_back(testing::boxProblem(obstacles, 0.5, v2(0.94, 0.06),
                                             v2(0.06, 0.94), horizon));
  if (d_min > 0) fleet.pairwise = fullConnectivity<double>(2, d_min, 0.5);
  return fleet;
}

}  // namespace

TEST_CASE("N = 1 stacking is the identity on objective and residuals") {
  FleetSpec<double> fleet;
  fleet.robots.push_back(testing::smallClutteredScene(InequalityMode::Dcbf, 0.5, 30));
  const auto joint = stack(fleet);

  SplitMix64 rng(3);
  const MatrixX<double> u = testing::randomMatrix(rng, 29, 2, -0.6, 0.6);

  CHECK(objectiveValue(joint, u) == objectiveValue(fleet.robots[0], u));
  const auto res_joint = constraintResiduals(joint, u);
  const auto res_single = constraintResiduals(fleet.robots[0], u);
  REQUIRE(res_joint.size() == res_single.size());
  for (std::size_t j = 0; j < res_joint.size(); ++j) {
    CHECK(res_joint[j] == res_single[j]);
  }
}

TEST_CASE("full connectivity yields N(N-1)/2 pairwise constraints") {
  CHECK(fullConnectivity<double>(4, 0.1, 0.5).size() == 6);
  CHECK(fullConnectivity<double>(2, 0.1, 0.5).size() == 1);
  CHECK(fullConnectivity<double>(1, 0.1, 0.5).empty());

  auto fleet = twoRobotFleet();
  fleet.robots.push_back(testing::boxProblem(testing::threeObstacles(), 0.5,
                                             v2(0.5, 0.05), v2(0.5, 0.94), 40));
  fleet.robots.push_back(testing::boxProblem(testing::threeObstacles(), 0.5,
                                             v2(0.05, 0.5), v2(0.94, 0.5), 40));
  fleet.pairwise = fullConnectivity<double>(4, 0.06, 0.5);
  const auto joint = stack(fleet);
  // 4 robots x 3 obstacles + 6 pairs
  CHECK(joint.constraints.size() == 18);
  Index pairs = 0;
  for (const auto& c : joint.constraints) pairs += c.isPairwise() ? 1 : 0;
  CHECK(pairs == 6);
}

TEST_CASE("separable terms keep the standalone per-robot gradients") {
  // K = 1 removes the ergodic coupling, so the joint augmented gradient
  // must consist of the standalone blocks.
  auto fleet = twoRobotFleet(/*d_min=*/0.0);
  for (auto& robot : fleet.robots) {
    robot.objective = makeErgodicObjective(
        FourierBasis<double>(robot.workspace, 1), SpatialMeasure<double>::uniform(),
        robot.dynamics);
  }
  const auto joint = stack(fleet);
  const auto cfg = testing::quickConfig();

  SplitMix64 rng(7);
  const MatrixX<double> left = testing::randomMatrix(rng, 39, 2, -0.4, 0.4);
  const MatrixX<double> right = testing::randomMatrix(rng, 39, 2, -0.4, 0.4);
  MatrixX<double> stacked(39, 4);
  stacked << left, right;

  detail::AugmentedLagrangian<double> al_joint(joint, cfg);
  detail::AugmentedLagrangian<double> al_left(fleet.robots[0], cfg);
  detail::AugmentedLagrangian<double> al_right(fleet.robots[1], cfg);

  MatrixX<double> g_joint(39, 4), g_left(39, 2), g_right(39, 2);
  al_joint.evaluate(stacked, &g_joint, nullptr);
  al_left.evaluate(left, &g_left, nullptr);
  al_right.evaluate(right, &g_right, nullptr);

  CHECK(g_joint.leftCols(2) == g_left);
  CHECK(g_joint.rightCols(2) == g_right);
}

TEST_CASE("stacked gradient matches finite differences") {
  auto fleet = twoRobotFleet(0.3);  // large d_min so the pair term is active
  const auto joint = stack(fleet);
  const auto cfg = testing::quickConfig();
  SplitMix64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    MatrixX<double> u = initialize(joint, cfg);
    u += testing::randomMatrix(rng, u.rows(), u.cols(), -0.15, 0.15);
    REQUIRE(gradCheck(joint, cfg, u) < 1e-4);
  }
}

TEST_CASE("coincident starts violate the pairwise safe-start invariant") {
  auto fleet = twoRobotFleet();
  fleet.robots[1].start = fleet.robots[0].start;
  CHECK_THROWS_WITH_AS(stack(fleet).validate(), doctest::Contains("pair_0_1"),
                       std::invalid_argument);
}

TEST_CASE("mismatched horizons or workspaces are rejected") {
  auto fleet = twoRobotFleet();
  fleet.robots[1].horizon = 50;
  CHECK_THROWS_AS(fleet.validate(), std::invalid_argument);

  auto fleet2 = twoRobotFleet();
  fleet2.robots[1].dt = 0.2;
  CHECK_THROWS_AS(fleet2.validate(), std::invalid_argument);
}

TEST_CASE("pairwise audit symmetry") {
  const auto dyn2 = stackDynamics<double>(
      {singleIntegrator<double>(2), singleIntegrator<double>(2)});
  std::vector<DcbfConstraint<double>> ij{
      DcbfConstraint<double>(PairwiseBarrier<double>(0, 1, 0.1), 0.5, "ij")};
  std::vector<DcbfConstraint<double>> ji{
      DcbfConstraint<double>(PairwiseBarrier<double>(1, 0, 0.1), 0.5, "ji")};

  SplitMix64 rng(19);
  Trajectory<double> traj;
  traj.dt = 0.1;
  traj.states = testing::randomMatrix(rng, 25, 4, 0.0, 1.0);
  traj.controls = MatrixX<double>::Zero(24, 4);

  const auto a = auditTrajectory(ij, traj, dyn2.project, 2);
  const auto b = auditTrajectory(ji, traj, dyn2.project, 2);
  CHECK(a.constraints[0].min_value == b.constraints[0].min_value);
  CHECK(a.constraints[0].min_residual == b.constraints[0].min_residual);
  CHECK(a.constraints[0].first_violation == b.constraints[0].first_violation);
}

TEST_CASE("two crossing robots respect the separation") {
  auto fleet = twoRobotFleet(0.08, /*with_obstacles=*/true, 60);
  auto cfg = testing::quickConfig(5);
  const auto solutions = solveFleet(fleet, cfg);
  REQUIRE(solutions.size() == 2);
  REQUIRE(solutions[0].converged);

  const auto joint = stack(fleet);
  const auto joint_traj = rollout(
      joint.dynamics, joint.start,
      [&] {
        MatrixX<double> u(fleet.robots[0].horizon - 1, 4);
        u << solutions[0].trajectory.controls, solutions[1].trajectory.controls;
        return u;
      }(),
      joint.dt);
  const auto report =
      auditTrajectory(joint.constraints, joint_traj, joint.dynamics.project, 2);
  CHECK(report.passed);

  double min_dist = 1e9;
  for (Index t = 0; t < joint_traj.horizon(); ++t) {
    min_dist = std::min(min_dist, (solutions[0].trajectory.states.row(t) -
                                   solutions[1].trajectory.states.row(t))
                                      .norm());
  }
  CHECK(min_dist >= 0.08 - 1e-6);
}

TEST_CASE("dropping the pairwise barriers cannot hurt the metric") {
  auto with_pairs = twoRobotFleet(0.25, true, 50);
  auto without = twoRobotFleet(0.0, true, 50);
  const auto cfg = testing::quickConfig(9);
  const auto a = solveFleet(with_pairs, cfg);
  const auto b = solveFleet(without, cfg);
  if (a[0].converged && b[0].converged) {
    CHECK(b[0].metric_value <= a[0].metric_value + 1e-8);
  }
}

TEST_CASE("relabeling two robots permutes the solution bit-exactly") {
  auto fleet = twoRobotFleet(0.1, true, 40);
  auto swapped = fleet;
  std::swap(swapped.robots[0], swapped.robots[1]);
  // pair (0,1) keeps the same geometry after the swap

  auto cfg = testing::quickConfig(31);
  cfg.init_perturbation = 0.0;  // the nominal initialization is symmetric
  cfg.max_outer = 4;            // equivariance holds at any iterate

  const auto a = solveFleet(fleet, cfg);
  const auto b = solveFleet(swapped, cfg);
  CHECK(a[0].trajectory.states == b[1].trajectory.states);
  CHECK(a[1].trajectory.states == b[0].trajectory.states);
  CHECK(a[0].trajectory.controls == b[1].trajectory.controls);
  CHECK(a[0].objective_value == b[0].objective_value);
}

TEST_CASE("unstacked trajectories slice the joint states") {
  auto fleet = twoRobotFleet(0.1, false, 30);
  const auto joint = stack(fleet);
  auto cfg = testing::quickConfig(1);
  cfg.max_outer = 2;
  cfg.max_inner = 40;
  const auto joint_sol = solve(joint, cfg);
  const auto parts = unstackSolution(fleet, joint_sol);
  CHECK(parts[0].trajectory.states == joint_sol.trajectory.states.leftCols(2));
  CHECK(parts[1].trajectory.states == joint_sol.trajectory.states.rightCols(2));
  CHECK(parts[0].trajectory.controls == joint_sol.trajectory.controls.leftCols(2));
}
