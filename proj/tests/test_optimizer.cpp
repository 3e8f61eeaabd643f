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

#include <cmath>

#include "ergosafe/solver.hpp"
#include "scenes.hpp"
#include "testing_utils.hpp"

using namespace ergosafe;
using testing::v2;

TEST_CASE("initialization drives the straight line") {
  auto spec = testing::boxProblem({}, 0.5, v2(0.0, 0.0), v2(1.0, 0.0), 11, 0.1,
                                  3, InequalityMode::None, /*control_bound=*/0.0);
  auto cfg = testing::quickConfig();
  cfg.init_perturbation = 0.0;

  const MatrixX<double> u = initialize(spec, cfg);
  REQUIRE(u.rows() == 10);
  for (Index t = 0; t < u.rows(); ++t) {
    CHECK(u(t, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(u(t, 1) == 0.0);
  }

  spec.goal = spec.start;
  CHECK(initialize(spec, cfg) == MatrixX<double>::Zero(10, 2));
}

TEST_CASE("initialization is seeded and bounded") {
  const auto spec = testing::smallClutteredScene();
  auto cfg = testing::quickConfig(42);

  const MatrixX<double> a = initialize(spec, cfg);
  const MatrixX<double> b = initialize(spec, cfg);
  CHECK(a == b);

  cfg.seed = 43;
  CHECK(initialize(spec, cfg) != a);

  // perturbation magnitude is 0.01 * min extent around the nominal line
  SolverConfig<double> plain = cfg;
  plain.init_perturbation = 0.0;
  const MatrixX<double> nominal = initialize(spec, plain);
  CHECK(((a - nominal).cwiseAbs().maxCoeff()) <= 0.01 + 1e-12);
}

TEST_CASE("objective value decomposes into metric and effort") {
  auto spec = testing::smallClutteredScene();
  SplitMix64 rng(5);
  const MatrixX<double> u = testing::randomMatrix(rng, spec.horizon - 1, 2, -0.5, 0.5);

  // R = 0: objective equals the ergodic metric alone
  spec.control_weight.setZero();
  const auto traj = rollout(spec.dynamics, spec.start, u, spec.dt);
  CHECK(objectiveValue(spec, u) == spec.objective.metric(traj));

  // doubling R doubles the effort term exactly
  spec.control_weight = MatrixX<double>::Identity(2, 2);
  const double effort1 = controlEffort(spec, u);
  spec.control_weight = 2.0 * MatrixX<double>::Identity(2, 2);
  CHECK(controlEffort(spec, u) == 2.0 * effort1);

  // stationary trajectory: objective is the stationary metric
  spec.control_weight = MatrixX<double>::Identity(2, 2);
  const MatrixX<double> zeros = MatrixX<double>::Zero(spec.horizon - 1, 2);
  const auto still = rollout(spec.dynamics, spec.start, zeros, spec.dt);
  CHECK(objectiveValue(spec, zeros) == spec.objective.metric(still));
}

TEST_CASE("spec validation catches unsafe boundaries and bad weights") {
  auto spec = testing::smallClutteredScene();
  CHECK_NOTHROW(spec.validate());

  auto inside = spec;
  inside.start = v2(0.30, 0.62);  // center of obstacle_0
  CHECK_THROWS_WITH_AS(inside.validate(),
                       doctest::Contains("obstacle_0"), std::invalid_argument);

  auto outside = spec;
  outside.goal = v2(1.2, 0.5);
  CHECK_THROWS_AS(outside.validate(), std::invalid_argument);

  auto asym = spec;
  asym.control_weight(0, 1) = 0.5;
  CHECK_THROWS_AS(asym.validate(), std::invalid_argument);

  auto indefinite = spec;
  indefinite.control_weight = -MatrixX<double>::Identity(2, 2);
  CHECK_THROWS_AS(indefinite.validate(), std::invalid_argument);

  // ignoring barriers makes the unsafe start acceptable
  inside.mode = InequalityMode::None;
  CHECK_NOTHROW(inside.validate());
}

TEST_CASE("gradient check: quadratic-only problem is exact") {
  // K = 1 keeps only the constant mode, so the ergodic term is identically
  // zero and the augmented objective is a quadratic in the controls.
  auto spec = testing::boxProblem({}, 0.5, v2(0.3, 0.3), v2(0.7, 0.6), 12, 0.1,
                                  1, InequalityMode::None, 0.0);
  auto cfg = testing::quickConfig();
  SplitMix64 rng(9);
  const MatrixX<double> u = testing::randomMatrix(rng, 11, 2, -0.3, 0.3);
  CHECK(gradCheck(spec, cfg, u) < 1e-8);
}

TEST_CASE("gradient check: full problem against finite differences") {
  auto cfg = testing::quickConfig();
  SplitMix64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const double gamma = rng.uniform(0.2, 1.0);
    auto spec = testing::smallClutteredScene(
        trial % 2 == 0 ? InequalityMode::Dcbf : InequalityMode::PlainH, gamma,
        16, 4);
    MatrixX<double> u = initialize(spec, cfg);
    u += testing::randomMatrix(rng, u.rows(), u.cols(), -0.2, 0.2);
    const double err = gradCheck(spec, cfg, u);
    REQUIRE(err < 1e-4);
  }
}

TEST_CASE("gradient check is deterministic") {
  const auto spec = testing::smallClutteredScene();
  const auto cfg = testing::quickConfig();
  SplitMix64 rng(123);
  const MatrixX<double> u = testing::randomMatrix(rng, spec.horizon - 1, 2, -0.4, 0.4);
  CHECK(gradCheck(spec, cfg, u) == gradCheck(spec, cfg, u));
}

TEST_CASE("unconstrained exploration beats the stationary point") {
  // no obstacles, start == goal in the middle of the box
  auto spec = testing::boxProblem({}, 0.5, v2(0.5, 0.5), v2(0.5, 0.5), 200, 0.1,
                                  10, InequalityMode::None);
  const auto cfg = testing::quickConfig(3);

  const MatrixX<double> zeros = MatrixX<double>::Zero(spec.horizon - 1, 2);
  const auto still = rollout(spec.dynamics, spec.start, zeros, spec.dt);
  const double stationary = spec.objective.metric(still);

  const auto sol = solve(spec, cfg);
  CHECK(sol.converged);
  CHECK(sol.metric_value < 0.1 * stationary);
}

TEST_CASE("safety-critical solve passes the audit with the chain bound") {
  const double gamma = 0.5;
  auto spec = testing::smallClutteredScene(InequalityMode::Dcbf, gamma, 80, 6);
  const auto cfg = testing::quickConfig(7);
  const auto sol = solve(spec, cfg);
  REQUIRE(sol.converged);
  CHECK(sol.inequality_violation <= 1e-8);

  const auto report = auditTrajectory(spec.constraints, sol.trajectory,
                                      spec.dynamics.project, 2);
  CHECK(report.passed);
  for (const auto& audit : report.constraints) {
    CHECK(audit.min_residual >= -1e-8);
    CHECK(audit.min_value >= 0.0);
  }

  // exponential lower bound h(x_t) >= (1-gamma)^t h(x_0) - 1e-6
  for (const auto& c : spec.constraints) {
    double bound =
        c.barrierValue(spec.dynamics.project(sol.trajectory.states.row(0).transpose()), 2);
    for (Index t = 0; t < sol.trajectory.horizon(); ++t) {
      const double h = c.barrierValue(
          spec.dynamics.project(sol.trajectory.states.row(t).transpose()), 2);
      REQUIRE(h >= bound - 1e-6);
      bound *= (1.0 - gamma);
    }
  }

  // terminal boundary condition within the equality tolerance
  CHECK(sol.equality_violation <= 1e-3);
  CHECK((sol.trajectory.states.row(spec.horizon - 1).transpose() - spec.goal)
            .cwiseAbs()
            .maxCoeff() <= 1e-3);
}

TEST_CASE("constraints can only restrict the feasible set") {
  auto free_spec = testing::smallClutteredScene(InequalityMode::None, 0.5, 80);
  auto dcbf_spec = testing::smallClutteredScene(InequalityMode::Dcbf, 0.5, 80);
  const auto cfg = testing::quickConfig(11);
  const auto free_sol = solve(free_spec, cfg);
  const auto dcbf_sol = solve(dcbf_spec, cfg);
  REQUIRE(free_sol.converged);
  REQUIRE(dcbf_sol.converged);
  CHECK(free_sol.metric_value <= dcbf_sol.metric_value + 1e-8);
}

TEST_CASE("solve is deterministic and reports monotone violation progress") {
  const auto spec = testing::smallClutteredScene(InequalityMode::Dcbf, 0.4, 60);
  const auto cfg = testing::quickConfig(21);

  const auto a = solve(spec, cfg);
  const auto b = solve(spec, cfg);
  CHECK(a.trajectory.states == b.trajectory.states);
  CHECK(a.trajectory.controls == b.trajectory.controls);
  CHECK(a.objective_value == b.objective_value);
  CHECK(a.converged == b.converged);

  // violation of the returned iterate does not exceed the initialization's
  detail::AugmentedLagrangian<double> al(spec, cfg);
  detail::AlDiagnostics<double> at_init;
  al.evaluate(initialize(spec, cfg), nullptr, &at_init);
  const double init_viol = std::max({at_init.equality_violation,
                                     at_init.inequality_violation,
                                     at_init.workspace_violation});
  if (a.converged) {
    const double final_viol = std::max({a.equality_violation,
                                        a.inequality_violation,
                                        a.workspace_violation});
    CHECK(final_viol <= init_viol);
  }
}

TEST_CASE("control bounds are honored") {
  auto spec = testing::smallClutteredScene(InequalityMode::Dcbf, 0.5, 60);
  const auto cfg = testing::quickConfig(2);
  const auto sol = solve(spec, cfg);
  CHECK(sol.trajectory.controls.maxCoeff() <= 1.0 + 1e-12);
  CHECK(sol.trajectory.controls.minCoeff() >= -1.0 - 1e-12);
}

TEST_CASE("non-convergence returns a solution instead of throwing") {
  auto spec = testing::smallClutteredScene(InequalityMode::Dcbf, 0.5, 60);
  auto cfg = testing::quickConfig(4);
  cfg.max_outer = 1;
  cfg.max_inner = 2;  // far too few to converge
  const auto sol = solve(spec, cfg);
  CHECK_FALSE(sol.converged);
  CHECK(sol.trajectory.horizon() == spec.horizon);
}
