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

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ergosafe/io/csv.hpp"
#include "ergosafe/io/scenario.hpp"
#include "scenes.hpp"
#include "testing_utils.hpp"

using namespace ergosafe;
namespace fs = std::filesystem;

namespace {

const std::string kScenarioDir = ERGOSAFE_SCENARIO_DIR;

fs::path tempDir() {
  const auto dir = fs::temp_directory_path() / "ergosafe_io_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("the shipped cluttered scene builds a valid problem") {
  const auto sc = io::loadScenario(kScenarioDir + "/cluttered8.json");
  CHECK(sc.horizon == 200);
  CHECK(sc.dt == 0.1);
  CHECK(sc.obstacles.size() == 8);
  CHECK(sc.gamma == 0.5);
  CHECK(sc.modes_per_dim == 10);

  const auto spec = io::buildProblem(sc);
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.constraints.size() == 8);

  // boundary states keep a sampling-compatible margin from every barrier
  for (const auto& c : spec.constraints) {
    CHECK(c.barrierValue(spec.start, 2) >= 0.05);
    CHECK(c.barrierValue(spec.goal, 2) >= 0.05);
  }
}

TEST_CASE("the shipped fleet scene builds a four-robot fleet") {
  const auto sc = io::loadScenario(kScenarioDir + "/fleet4.json");
  const auto fleet = io::buildFleet(sc);
  CHECK(fleet.robots.size() == 4);
  CHECK(fleet.pairwise.size() == 6);
  CHECK_NOTHROW(stack(fleet).validate());
}

TEST_CASE("scenario parse -> serialize -> parse is a fixed point") {
  for (const std::string name : {"cluttered8.json", "fleet4.json"}) {
    const auto sc = io::loadScenario(kScenarioDir + "/" + name);
    const auto j1 = io::toJson(sc);
    const auto sc2 = io::scenarioFromJson(j1, "");
    const auto j2 = io::toJson(sc2);
    CHECK(j1 == j2);
  }
}

TEST_CASE("scenario errors name the offending field") {
  using nlohmann::json;
  CHECK_THROWS_WITH_AS(io::scenarioFromJson(json::parse(R"({"robots":[]})"), ""),
                       doctest::Contains("workspace"), io::ScenarioError);

  const auto no_robots = R"({"workspace":{"bounds":[1,1]}})";
  CHECK_THROWS_WITH_AS(io::scenarioFromJson(json::parse(no_robots), ""),
                       doctest::Contains("robots"), io::ScenarioError);

  const auto bad_center = R"({
    "workspace": {"bounds": [1, 1]},
    "obstacles": [{"center": "oops", "scale": [0.1, 0.1]}],
    "robots": [{"start": [0, 0], "goal": [1, 1]}]
  })";
  CHECK_THROWS_WITH_AS(io::scenarioFromJson(json::parse(bad_center), ""),
                       doctest::Contains("obstacles[0].center"), io::ScenarioError);

  CHECK_THROWS_AS(io::loadScenario("/nonexistent/scene.json"), io::ScenarioError);
}

TEST_CASE("grid measure file round trip and validation") {
  const auto dir = tempDir();
  const Workspace<double> ws((VectorX<double>(2) << 1.0, 1.0).finished());

  // write an exactly normalized two-level density
  const Index cells = 10;
  VectorX<double> density(cells * cells);
  for (Index i = 0; i < density.size(); ++i) {
    density(i) = (i % 2 == 0) ? 1.2 : 0.8;
  }
  const auto measure = SpatialMeasure<double>::grid(VectorXi::Constant(2, cells), density);
  const auto path = (dir / "measure.txt").string();
  io::saveGridMeasure(measure, ws, path);

  const auto loaded = io::loadGridMeasure(path);
  CHECK(loaded.bounds == ws.extents());
  CHECK(loaded.measure.cells() == measure.cells());
  CHECK(loaded.measure.densities() == measure.densities());

  // malformed files carry line information
  {
    std::ofstream bad(dir / "bad.txt");
    bad << "bounds 1 1\n";
  }
  CHECK_THROWS_WITH_AS(io::loadGridMeasure((dir / "bad.txt").string()),
                       doctest::Contains(":1"), io::ScenarioError);

  {
    std::ofstream bad(dir / "short.txt");
    bad << "dims 3 3\nbounds 1 1\n1 1 1 1\n";
  }
  CHECK_THROWS_WITH_AS(io::loadGridMeasure((dir / "short.txt").string()),
                       doctest::Contains("expected 9"), io::ScenarioError);
}

TEST_CASE("the shipped bimodal measure loads and normalizes") {
  const auto grid = io::loadGridMeasure(kScenarioDir + "/measures/bimodal_20.txt");
  const Workspace<double> ws(grid.bounds);
  CHECK(grid.measure.totalMass(ws) == doctest::Approx(1.0).epsilon(1e-9));

  // a scenario can point at it
  auto sc = io::loadScenario(kScenarioDir + "/cluttered8.json");
  sc.measure_kind = "grid";
  sc.measure_path = kScenarioDir + "/measures/bimodal_20.txt";
  const auto spec = io::buildProblem(sc);
  CHECK(spec.objective.target().size() == 100);
  // a non-uniform measure has energy outside the constant mode
  CHECK(spec.objective.target().tail(99).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("trajectory CSV round trip preserves rollout consistency") {
  const auto dir = tempDir();
  const auto dyn = singleIntegrator<double>(2);
  SplitMix64 rng(3);
  const MatrixX<double> controls = testing::randomMatrix(rng, 49, 2, -0.8, 0.8);
  const auto traj = rollout<double>(dyn, testing::v2(0.2, 0.4), controls, 0.1);

  const auto path = (dir / "trajectory.csv").string();
  io::writeTrajectoryCsv(path, {traj});
  const auto back = io::readTrajectoryCsv(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].dt == traj.dt);
  CHECK(back[0].states == traj.states);
  CHECK(back[0].controls == traj.controls);

  // consistency after the round trip
  const auto re = rollout<double>(dyn, back[0].states.row(0).transpose(),
                                  back[0].controls, back[0].dt);
  CHECK((re.states - back[0].states).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("multi-robot trajectory CSV keeps robots separate") {
  const auto dir = tempDir();
  const auto dyn = singleIntegrator<double>(2);
  SplitMix64 rng(5);
  const auto a = rollout<double>(dyn, testing::v2(0.1, 0.1),
                                 testing::randomMatrix(rng, 19, 2, -0.5, 0.5), 0.1);
  const auto b = rollout<double>(dyn, testing::v2(0.9, 0.9),
                                 testing::randomMatrix(rng, 19, 2, -0.5, 0.5), 0.1);
  const auto path = (dir / "fleet_traj.csv").string();
  io::writeTrajectoryCsv(path, {a, b});
  const auto back = io::readTrajectoryCsv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].states == a.states);
  CHECK(back[1].states == b.states);
  CHECK(back[1].controls == b.controls);
}

TEST_CASE("coverage, trials, summary and sweep writers emit well-formed tables") {
  const auto dir = tempDir();
  const Workspace<double> ws((VectorX<double>(2) << 1.0, 1.0).finished());
  const FourierBasis<double> basis(ws, 3);

  io::writeCoverageCsv((dir / "coverage.csv").string(), basis,
                       VectorX<double>::Constant(9, 0.5),
                       VectorX<double>::Zero(9));
  std::ifstream cov(dir / "coverage.csv");
  std::string line;
  int rows = 0;
  while (std::getline(cov, line)) ++rows;
  CHECK(rows == 10);  // header + 9 modes

  MonteCarloResult<double> result;
  for (int k = 0; k < 2; ++k) {
    TrialOutcome<double> t;
    t.trial = k;
    t.mode = k == 0 ? InequalityMode::Dcbf : InequalityMode::PlainH;
    t.start = testing::v2(0.1, 0.2);
    t.goal = testing::v2(0.8, 0.9);
    t.solver_converged = true;
    t.plan_metric = 0.01 * (k + 1);
    t.plan_min_h = 0.05;
    t.executed_min_h = k == 0 ? 0.02 : -0.01;
    t.tracking_rms = 0.004;
    t.collided = k != 0;
    t.success = k == 0;
    t.first_violation_time = {std::nullopt,
                              k == 0 ? std::nullopt : std::optional<double>(1.5)};
    result.trials.push_back(std::move(t));
  }
  ModeSummary<double> s;
  s.mode = InequalityMode::Dcbf;
  s.trials = 1;
  s.converged = 1;
  s.successes = 1;
  s.success_rate = 1.0;
  s.success_rate_converged = 1.0;
  result.summary.push_back(s);
  s.mode = InequalityMode::PlainH;
  s.successes = 0;
  s.success_rate = 0.0;
  s.success_rate_converged = 0.0;
  result.summary.push_back(s);

  io::writeTrialsCsv((dir / "trials.csv").string(), result);
  io::writeModeSummaryCsv((dir / "summary.csv").string(), result);

  std::ifstream trials(dir / "trials.csv");
  std::getline(trials, line);
  CHECK(line ==
        "trial,mode,start0,start1,goal0,goal1,converged,plan_metric,plan_min_h,"
        "executed_min_h,tracking_rms,collided,success,first_violation_s_0,"
        "first_violation_s_1");
  rows = 0;
  while (std::getline(trials, line)) ++rows;
  CHECK(rows == 2);

  std::ifstream summary(dir / "summary.csv");
  rows = 0;
  while (std::getline(summary, line)) ++rows;
  CHECK(rows == 3);  // header + two mode rows

  std::vector<GammaResult<double>> sweep(2);
  sweep[0].gamma = 0.1;
  sweep[0].metric = 0.02;
  sweep[0].min_h = 0.1;
  sweep[0].converged = true;
  sweep[1].gamma = 1.0;
  sweep[1].metric = 0.01;
  sweep[1].min_h = 0.0;
  sweep[1].converged = true;
  io::writeGammaSweepCsv((dir / "gamma_sweep.csv").string(), sweep);
  std::ifstream gs(dir / "gamma_sweep.csv");
  std::getline(gs, line);
  CHECK(line == "gamma,metric,min_h,converged");
  rows = 0;
  while (std::getline(gs, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("formatDouble survives the decimal round trip") {
  SplitMix64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-8.0, 8.0));
    CHECK(std::stod(io::formatDouble(v)) == v);
  }
}
