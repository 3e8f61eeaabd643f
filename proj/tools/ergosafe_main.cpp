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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ergosafe/ergosafe.hpp"
#include "ergosafe/io/csv.hpp"
#include "ergosafe/io/scenario.hpp"

namespace {

using namespace ergosafe;
using nlohmann::json;

struct CommonOptions {
  std::string scenario;
  std::string out = "out";
  std::string mode = "sc_eto";
  Index trials = 20;
  std::int64_t seed = -1;  // -1: use the scenario's seed
  std::string gammas = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
  Index modes_per_dim = 0;  // 0: use the scenario's value
  double tol = 1e-4;
};

InequalityMode parseMode(const std::string& s) {
  if (s == "sc_eto") return InequalityMode::Dcbf;
  if (s == "eto_plain_h") return InequalityMode::PlainH;
  if (s == "none") return InequalityMode::None;
  throw io::ScenarioError("unknown mode '" + s + "' (expected sc_eto, eto_plain_h or none)");
}

io::Scenario loadWithOverrides(const CommonOptions& opt) {
  io::Scenario sc = io::loadScenario(opt.scenario);
  if (opt.modes_per_dim > 0) sc.modes_per_dim = opt.modes_per_dim;
  if (opt.seed >= 0) sc.seed = static_cast<std::uint64_t>(opt.seed);
  return sc;
}

SolverConfig<double> solverConfig(const io::Scenario& sc) {
  SolverConfig<double> cfg = sc.solver;
  cfg.seed = sc.seed;
  return cfg;
}

json auditJson(const SafetyReport<double>& report) {
  json j;
  j["passed"] = report.passed;
  j["min_h"] = report.constraints.empty() ? json() : json(report.min_value);
  j["constraints"] = json::array();
  for (const auto& c : report.constraints) {
    json jc;
    jc["name"] = c.name;
    jc["min_h"] = c.min_value;
    jc["min_h_step"] = c.min_value_index;
    jc["min_residual"] = c.min_residual;
    jc["first_violation"] = c.first_violation.has_value() ? json(*c.first_violation) : json();
    jc["passed"] = c.passed;
    j["constraints"].push_back(std::move(jc));
  }
  return j;
}

json solutionJson(const Solution<double>& sol, const std::string& mode) {
  json j;
  j["mode"] = mode;
  j["converged"] = sol.converged;
  j["metric"] = sol.metric_value;
  j["objective"] = sol.objective_value;
  j["equality_violation"] = sol.equality_violation;
  j["inequality_violation"] = sol.inequality_violation;
  j["workspace_violation"] = sol.workspace_violation;
  j["iterations"]["outer"] = sol.outer_iterations;
  j["iterations"]["inner"] = sol.inner_iterations;
  j["seconds"] = sol.seconds;
  j["horizon"] = sol.trajectory.horizon();
  j["dt"] = sol.trajectory.dt;
  return j;
}

void writeReport(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw io::ScenarioError("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::filesystem::path outDir(const CommonOptions& opt) {
  std::filesystem::create_directories(opt.out);
  return opt.out;
}

int cmdPlan(const CommonOptions& opt) {
  const io::Scenario sc = loadWithOverrides(opt);
  if (sc.robots.size() != 1) {
    throw io::ScenarioError("plan expects a single-robot scenario (use the fleet command)");
  }
  ProblemSpec<double> spec = io::buildProblem(sc);
  spec.mode = parseMode(opt.mode);
  const auto cfg = solverConfig(sc);

  const Solution<double> sol = solve(spec, cfg);
  const auto dir = outDir(opt);

  io::writeTrajectoryCsv((dir / "trajectory.csv").string(), {sol.trajectory});
  const VectorX<double> c = spec.objective.coefficients(sol.trajectory.states);
  io::writeCoverageCsv((dir / "coverage.csv").string(), spec.objective.basis(), c,
                       spec.objective.target());

  const auto report = auditTrajectory(spec.constraints, sol.trajectory,
                                      spec.dynamics.project, spec.workspace.dim());
  json j = solutionJson(sol, opt.mode);
  j["seed"] = sc.seed;
  j["audit"] = auditJson(report);
  writeReport((dir / "report.json").string(), j);

  std::printf("%s: converged=%d metric=%.6g objective=%.6g audit=%s (%.2fs)\n",
              opt.mode.c_str(), sol.converged ? 1 : 0, sol.metric_value,
              sol.objective_value, report.passed ? "pass" : "FAIL", sol.seconds);
  return 0;
}

int cmdFleet(const CommonOptions& opt) {
  const io::Scenario sc = loadWithOverrides(opt);
  FleetSpec<double> fleet = io::buildFleet(sc);
  const InequalityMode mode = parseMode(opt.mode);
  for (auto& robot : fleet.robots) robot.mode = mode;
  const auto cfg = solverConfig(sc);

  const ProblemSpec<double> joint = stack(fleet);
  const Solution<double> joint_sol = solve(joint, cfg);
  const auto solutions = unstackSolution(fleet, joint_sol);
  const auto dir = outDir(opt);

  std::vector<Trajectory<double>> trajectories;
  for (const auto& s : solutions) trajectories.push_back(s.trajectory);
  io::writeTrajectoryCsv((dir / "trajectory.csv").string(), trajectories);

  const VectorX<double> c = joint.objective.coefficients(joint_sol.trajectory.states);
  io::writeCoverageCsv((dir / "coverage.csv").string(), joint.objective.basis(), c,
                       joint.objective.target());

  const auto report = auditTrajectory(joint.constraints, joint_sol.trajectory,
                                      joint.dynamics.project, joint.workspace.dim());
  json j = solutionJson(joint_sol, opt.mode);
  j["seed"] = sc.seed;
  j["robots"] = fleet.robots.size();
  j["pairwise_constraints"] = fleet.pairwise.size();
  j["audit"] = auditJson(report);
  writeReport((dir / "report.json").string(), j);

  std::printf("fleet of %zu: converged=%d metric=%.6g audit=%s (%.2fs)\n",
              fleet.robots.size(), joint_sol.converged ? 1 : 0,
              joint_sol.metric_value, report.passed ? "pass" : "FAIL",
              joint_sol.seconds);
  return 0;
}

int cmdMonteCarlo(const CommonOptions& opt) {
  const io::Scenario sc = loadWithOverrides(opt);
  ProblemSpec<double> base = io::buildProblem(sc);
  const auto cfg = solverConfig(sc);
  auto tc = TrackerConfig<double>::defaults(base.workspace.dim());

  const auto result = runMonteCarlo(
      base, cfg, tc, opt.trials,
      {InequalityMode::Dcbf, InequalityMode::PlainH}, sc.seed, threadLimit());

  const auto dir = outDir(opt);
  io::writeTrialsCsv((dir / "trials.csv").string(), result);
  io::writeModeSummaryCsv((dir / "summary.csv").string(), result);

  std::printf("%-12s %7s %10s %10s %9s\n", "mode", "trials", "converged",
              "successes", "success%");
  for (const auto& s : result.summary) {
    std::printf("%-12s %7ld %10ld %10ld %8.1f%%\n", toString(s.mode),
                static_cast<long>(s.trials), static_cast<long>(s.converged),
                static_cast<long>(s.successes), 100.0 * s.success_rate);
  }
  return 0;
}

int cmdAblate(const CommonOptions& opt) {
  const io::Scenario sc = loadWithOverrides(opt);
  ProblemSpec<double> base = io::buildProblem(sc);
  base.mode = InequalityMode::Dcbf;
  const auto cfg = solverConfig(sc);

  std::vector<double> gammas;
  std::stringstream ss(opt.gammas);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      gammas.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw io::ScenarioError("--gammas: bad value '" + tok + "'");
    }
  }

  const auto sweep = runGammaAblation(base, gammas, cfg, threadLimit());
  const auto dir = outDir(opt);
  io::writeGammaSweepCsv((dir / "gamma_sweep.csv").string(), sweep);
  for (const auto& r : sweep) {
    char name[64];
    std::snprintf(name, sizeof(name), "trajectory_gamma_%g.csv", r.gamma);
    io::writeTrajectoryCsv((dir / name).string(), {r.solution.trajectory});
  }

  std::printf("%8s %14s %12s %10s\n", "gamma", "metric", "min_h", "converged");
  for (const auto& r : sweep) {
    std::printf("%8.3f %14.6g %12.6g %10d\n", r.gamma, r.metric, r.min_h,
                r.converged ? 1 : 0);
  }
  return 0;
}

int cmdGradCheck(const CommonOptions& opt) {
  const io::Scenario sc = loadWithOverrides(opt);
  ProblemSpec<double> spec = io::buildProblem(sc);
  spec.mode = parseMode(opt.mode);
  const auto cfg = solverConfig(sc);

  MatrixX<double> controls = initialize(spec, cfg);
  SplitMix64 rng(SplitMix64::derive(sc.seed, 9001));
  for (Index t = 0; t < controls.rows(); ++t) {
    for (Index i = 0; i < controls.cols(); ++i) {
      controls(t, i) += 0.1 * rng.symmetric();
    }
  }
  const double err = gradCheck(spec, cfg, controls);
  std::printf("max relative gradient error: %.3e (tolerance %.1e)\n", err, opt.tol);
  if (err > opt.tol) {
    std::fprintf(stderr, "gradient check failed\n");
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe ergodic trajectory optimization for cluttered workspaces"};
  app.require_subcommand(1);
  CommonOptions opt;

  const auto addCommon = [&](CLI::App* cmd, bool needs_mode) {
    cmd->add_option("--scenario", opt.scenario, "scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opt.out, "output directory (default: out)");
    cmd->add_option("--seed", opt.seed, "override the scenario seed");
    cmd->add_option("--modes-per-dim", opt.modes_per_dim,
                    "override the Fourier modes per dimension");
    if (needs_mode) {
      cmd->add_option("--mode", opt.mode, "sc_eto | eto_plain_h | none");
    }
  };

  auto* plan = app.add_subcommand("plan", "plan one exploration trajectory");
  addCommon(plan, true);
  auto* fleet = app.add_subcommand("fleet", "plan a multi-robot fleet jointly");
  addCommon(fleet, true);
  auto* mc = app.add_subcommand("montecarlo",
                                "tracked-execution safety study over random start/goal pairs");
  addCommon(mc, false);
  mc->add_option("--trials", opt.trials, "number of start/goal pairs (default 20)");
  auto* ablate = app.add_subcommand("ablate", "sweep the barrier decay rate gamma");
  addCommon(ablate, false);
  ablate->add_option("--gammas", opt.gammas, "comma-separated gamma values");
  auto* gc = app.add_subcommand("grad-check",
                                "verify the solver gradient against finite differences");
  addCommon(gc, true);
  gc->add_option("--tol", opt.tol, "acceptance tolerance (default 1e-4)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(plan)) return cmdPlan(opt);
    if (app.got_subcommand(fleet)) return cmdFleet(opt);
    if (app.got_subcommand(mc)) return cmdMonteCarlo(opt);
    if (app.got_subcommand(ablate)) return cmdAblate(opt);
    if (app.got_subcommand(gc)) return cmdGradCheck(opt);
  } catch (const io::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
