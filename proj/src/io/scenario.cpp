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

#include "ergosafe/io/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace ergosafe::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError("scenario field '" + where + "': " + what);
}

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(where + "." + key, "missing");
  return *it;
}

double asDouble(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

Index asIndex(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<Index>();
}

std::string asString(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

VectorX<double> asVector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of numbers");
  VectorX<double> v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = asDouble(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

template <typename T>
void maybe(const json& j, const std::string& key, const std::string& where, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if constexpr (std::is_same_v<T, double>) {
    out = asDouble(*it, where + "." + key);
  } else if constexpr (std::is_same_v<T, Index>) {
    out = asIndex(*it, where + "." + key);
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!it->is_number_unsigned() && !it->is_number_integer()) {
      fail(where + "." + key, "expected an integer");
    }
    out = it->get<std::uint64_t>();
  }
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

Scenario scenarioFromJson(const json& j, const std::string& base_dir) {
  Scenario s;
  s.workspace_bounds = asVector(require(require(j, "workspace", ""), "bounds", "workspace"),
                                "workspace.bounds");

  maybe(j, "horizon", "", s.horizon);
  maybe(j, "dt", "", s.dt);
  maybe(j, "gamma", "", s.gamma);
  maybe(j, "modes_per_dim", "", s.modes_per_dim);
  maybe(j, "control_weight", "", s.control_weight);
  maybe(j, "control_bound", "", s.control_bound);
  maybe(j, "min_separation", "", s.min_separation);
  maybe(j, "seed", "", s.seed);

  if (j.contains("measure")) {
    const json& m = j.at("measure");
    s.measure_kind = asString(require(m, "kind", "measure"), "measure.kind");
    if (s.measure_kind == "grid") {
      s.measure_path = resolve(asString(require(m, "path", "measure"), "measure.path"),
                               base_dir);
    } else if (s.measure_kind != "uniform") {
      fail("measure.kind", "expected 'uniform' or 'grid'");
    }
  }

  if (j.contains("obstacles")) {
    const json& arr = j.at("obstacles");
    if (!arr.is_array()) fail("obstacles", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "obstacles[" + std::to_string(i) + "]";
      const json& o = arr[i];
      ObstacleConfig oc;
      oc.center = asVector(require(o, "center", where), where + ".center");
      oc.scale = asVector(require(o, "scale", where), where + ".scale");
      maybe(o, "buffer", where, oc.buffer);
      maybe(o, "radius", where, oc.radius);
      maybe(o, "p", where, oc.p);
      s.obstacles.push_back(std::move(oc));
    }
  }

  const json& robots = require(j, "robots", "");
  if (!robots.is_array() || robots.empty()) fail("robots", "expected a non-empty array");
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const std::string where = "robots[" + std::to_string(i) + "]";
    RobotConfig rc;
    rc.start = asVector(require(robots[i], "start", where), where + ".start");
    rc.goal = asVector(require(robots[i], "goal", where), where + ".goal");
    s.robots.push_back(std::move(rc));
  }

  if (j.contains("solver")) {
    const json& sv = j.at("solver");
    if (!sv.is_object()) fail("solver", "expected an object");
    maybe(sv, "max_outer", "solver", s.solver.max_outer);
    maybe(sv, "max_inner", "solver", s.solver.max_inner);
    maybe(sv, "initial_penalty", "solver", s.solver.initial_penalty);
    maybe(sv, "penalty_growth", "solver", s.solver.penalty_growth);
    maybe(sv, "armijo", "solver", s.solver.armijo);
    maybe(sv, "backtrack", "solver", s.solver.backtrack);
    maybe(sv, "gradient_tolerance", "solver", s.solver.gradient_tolerance);
    maybe(sv, "violation_tolerance", "solver", s.solver.violation_tolerance);
    maybe(sv, "equality_tolerance", "solver", s.solver.equality_tolerance);
    maybe(sv, "constraint_margin", "solver", s.solver.constraint_margin);
    maybe(sv, "init_perturbation", "solver", s.solver.init_perturbation);
  }
  return s;
}

json toJson(const Scenario& s) {
  json j;
  j["workspace"]["bounds"] = std::vector<double>(
      s.workspace_bounds.data(), s.workspace_bounds.data() + s.workspace_bounds.size());
  j["horizon"] = s.horizon;
  j["dt"] = s.dt;
  j["gamma"] = s.gamma;
  j["modes_per_dim"] = s.modes_per_dim;
  j["control_weight"] = s.control_weight;
  j["control_bound"] = s.control_bound;
  j["min_separation"] = s.min_separation;
  j["seed"] = s.seed;
  j["measure"]["kind"] = s.measure_kind;
  if (s.measure_kind == "grid") j["measure"]["path"] = s.measure_path;
  j["obstacles"] = json::array();
  for (const auto& o : s.obstacles) {
    json jo;
    jo["center"] = std::vector<double>(o.center.data(), o.center.data() + o.center.size());
    jo["scale"] = std::vector<double>(o.scale.data(), o.scale.data() + o.scale.size());
    jo["buffer"] = o.buffer;
    jo["radius"] = o.radius;
    jo["p"] = o.p;
    j["obstacles"].push_back(std::move(jo));
  }
  j["robots"] = json::array();
  for (const auto& r : s.robots) {
    json jr;
    jr["start"] = std::vector<double>(r.start.data(), r.start.data() + r.start.size());
    jr["goal"] = std::vector<double>(r.goal.data(), r.goal.data() + r.goal.size());
    j["robots"].push_back(std::move(jr));
  }
  json sv;
  sv["max_outer"] = s.solver.max_outer;
  sv["max_inner"] = s.solver.max_inner;
  sv["initial_penalty"] = s.solver.initial_penalty;
  sv["penalty_growth"] = s.solver.penalty_growth;
  sv["armijo"] = s.solver.armijo;
  sv["backtrack"] = s.solver.backtrack;
  sv["gradient_tolerance"] = s.solver.gradient_tolerance;
  sv["violation_tolerance"] = s.solver.violation_tolerance;
  sv["equality_tolerance"] = s.solver.equality_tolerance;
  sv["constraint_margin"] = s.solver.constraint_margin;
  sv["init_perturbation"] = s.solver.init_perturbation;
  j["solver"] = std::move(sv);
  return j;
}

Scenario loadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ScenarioError("malformed JSON in " + path + ": " + e.what());
  }
  return scenarioFromJson(j, std::filesystem::path(path).parent_path().string());
}

void saveScenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file: " + path);
  out << toJson(scenario).dump(2) << "\n";
}

GridMeasureFile loadGridMeasure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open measure file: " + path);

  std::string line;
  long line_no = 0;
  VectorXi dims;
  VectorX<double> bounds;
  std::vector<double> values;
  enum { WantDims, WantBounds, WantValues } state = WantDims;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first) || first[0] == '#') continue;
    const auto at = path + ":" + std::to_string(line_no);

    if (state == WantDims) {
      if (first != "dims") throw ScenarioError(at + ": expected 'dims ...'");
      std::vector<int> d;
      int v;
      while (ss >> v) d.push_back(v);
      if (d.empty()) throw ScenarioError(at + ": 'dims' needs at least one count");
      dims = Eigen::Map<VectorXi>(d.data(), static_cast<Index>(d.size()));
      state = WantBounds;
    } else if (state == WantBounds) {
      if (first != "bounds") throw ScenarioError(at + ": expected 'bounds ...'");
      std::vector<double> b;
      double v;
      while (ss >> v) b.push_back(v);
      if (static_cast<Index>(b.size()) != dims.size()) {
        throw ScenarioError(at + ": 'bounds' count must match 'dims'");
      }
      bounds = Eigen::Map<VectorX<double>>(b.data(), static_cast<Index>(b.size()));
      state = WantValues;
    } else {
      // `first` is already a value token
      try {
        values.push_back(std::stod(first));
      } catch (const std::exception&) {
        throw ScenarioError(at + ": expected a density value, got '" + first + "'");
      }
      double v;
      while (ss >> v) values.push_back(v);
      if (!ss.eof()) throw ScenarioError(at + ": trailing garbage");
    }
  }
  if (state != WantValues) {
    throw ScenarioError(path + ": missing 'dims' or 'bounds' header");
  }
  Index expected = 1;
  for (Index i = 0; i < dims.size(); ++i) expected *= dims(i);
  if (static_cast<Index>(values.size()) != expected) {
    throw ScenarioError(path + ": expected " + std::to_string(expected) +
                        " densities, found " + std::to_string(values.size()));
  }

  GridMeasureFile out;
  out.bounds = bounds;
  try {
    out.measure = SpatialMeasure<double>::grid(
        dims, Eigen::Map<VectorX<double>>(values.data(),
                                          static_cast<Index>(values.size())));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(path + ": " + e.what());
  }
  return out;
}

void saveGridMeasure(const SpatialMeasure<double>& measure,
                     const Workspace<double>& workspace, const std::string& path) {
  if (measure.kind() != SpatialMeasure<double>::Kind::Grid) {
    throw std::invalid_argument("saveGridMeasure: only grid measures serialize");
  }
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write measure file: " + path);
  out << "# ergosafe grid measure (row-major, dimension 0 slowest)\n";
  out << "dims";
  for (Index i = 0; i < measure.cells().size(); ++i) out << " " << measure.cells()(i);
  out << "\nbounds";
  char buf[64];
  for (Index i = 0; i < workspace.dim(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", workspace.extent(i));
    out << " " << buf;
  }
  out << "\n";
  const auto& d = measure.densities();
  for (Index i = 0; i < d.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", d(i));
    out << buf << ((i + 1) % 8 == 0 || i + 1 == d.size() ? "\n" : " ");
  }
}

std::vector<DcbfConstraint<double>> buildConstraints(const Scenario& s, Index robot) {
  std::vector<DcbfConstraint<double>> out;
  for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
    const auto& o = s.obstacles[i];
    out.emplace_back(
        Superellipsoid<double>(o.center, o.scale, o.buffer, o.radius, o.p),
        s.gamma, robot, "obstacle_" + std::to_string(i));
  }
  return out;
}

namespace {

SpatialMeasure<double> buildMeasure(const Scenario& s, const Workspace<double>& ws) {
  if (s.measure_kind == "uniform") return SpatialMeasure<double>::uniform();
  GridMeasureFile grid = loadGridMeasure(s.measure_path);
  if (grid.bounds.size() != ws.dim() ||
      (grid.bounds - ws.extents()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ScenarioError(s.measure_path + ": measure bounds do not match the workspace");
  }
  return grid.measure;
}

}  // namespace

ProblemSpec<double> buildProblem(const Scenario& s, Index robot_index) {
  if (robot_index < 0 || robot_index >= static_cast<Index>(s.robots.size())) {
    throw ScenarioError("robot index out of range");
  }
  const Workspace<double> ws(s.workspace_bounds);
  auto dyn = singleIntegrator<double>(ws.dim());
  if (s.control_bound > 0) dyn = withControlBound(dyn, s.control_bound);
  const FourierBasis<double> basis(ws, s.modes_per_dim);
  auto objective = makeErgodicObjective(basis, buildMeasure(s, ws), dyn);

  ProblemSpec<double> spec(std::move(dyn), ws, std::move(objective),
                           s.robots[robot_index].start, s.robots[robot_index].goal,
                           s.horizon, s.dt);
  spec.control_weight =
      s.control_weight * MatrixX<double>::Identity(ws.dim(), ws.dim());
  spec.constraints = buildConstraints(s);
  return spec;
}

FleetSpec<double> buildFleet(const Scenario& s) {
  FleetSpec<double> fleet;
  for (std::size_t r = 0; r < s.robots.size(); ++r) {
    fleet.robots.push_back(buildProblem(s, static_cast<Index>(r)));
  }
  if (s.min_separation > 0 && s.robots.size() > 1) {
    fleet.pairwise = fullConnectivity<double>(
        static_cast<Index>(s.robots.size()), s.min_separation, s.gamma);
  }
  return fleet;
}

}  // namespace ergosafe::io
