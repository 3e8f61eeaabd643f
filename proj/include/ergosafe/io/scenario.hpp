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

#ifndef ERGOSAFE_IO_SCENARIO_HPP
#define ERGOSAFE_IO_SCENARIO_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergosafe/ergosafe.hpp"

namespace ergosafe::io {

/// Malformed scenario or measure file (maps to CLI exit code 1, as opposed
/// to std::invalid_argument for violated problem invariants, exit code 2).
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ObstacleConfig {
  VectorX<double> center;
  VectorX<double> scale;
  double buffer = 0.02;
  double radius = 1.0;
  double p = 2.0;
};

struct RobotConfig {
  VectorX<double> start;
  VectorX<double> goal;
};

/// Parsed scenario file. Defaults follow the shipped scenes: T = 200
/// steps of dt = 0.1 s over a uniform measure.
struct Scenario {
  VectorX<double> workspace_bounds;
  std::vector<ObstacleConfig> obstacles;
  std::string measure_kind = "uniform";  // "uniform" | "grid"
  std::string measure_path;              // resolved grid file path
  std::vector<RobotConfig> robots;
  double min_separation = 0.0;  // pairwise d_min; 0 disables inter-robot barriers
  double gamma = 0.5;
  Index horizon = 200;
  double dt = 0.1;
  Index modes_per_dim = 10;
  double control_weight = 0.01;  // R = control_weight * I
  double control_bound = 1.0;    // <= 0 means unbounded
  std::uint64_t seed = 0;
  SolverConfig<double> solver;
};

Scenario scenarioFromJson(const nlohmann::json& j, const std::string& base_dir);
nlohmann::json toJson(const Scenario& scenario);

Scenario loadScenario(const std::string& path);
void saveScenario(const Scenario& scenario, const std::string& path);

/// Plain-text grid measure: comment lines start with '#', then a "dims"
/// line, a "bounds" line, and the row-major densities.
struct GridMeasureFile {
  SpatialMeasure<double> measure = SpatialMeasure<double>::uniform();
  VectorX<double> bounds;
};

GridMeasureFile loadGridMeasure(const std::string& path);
void saveGridMeasure(const SpatialMeasure<double>& measure,
                     const Workspace<double>& workspace, const std::string& path);

/// Obstacle barriers of the scenario, for robot slice `robot`.
std::vector<DcbfConstraint<double>> buildConstraints(const Scenario& scenario,
                                                     Index robot = 0);

/// Single-robot problem for scenario robot `robot_index`.
ProblemSpec<double> buildProblem(const Scenario& scenario, Index robot_index = 0);

/// Fleet over all scenario robots with full pairwise connectivity at
/// min_separation (when positive).
FleetSpec<double> buildFleet(const Scenario& scenario);

}  // namespace ergosafe::io

#endif  // ERGOSAFE_IO_SCENARIO_HPP
