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

#include "ergosafe/io/csv.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ergosafe/io/scenario.hpp"  // ScenarioError

namespace ergosafe::io {

std::string formatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void writeTrajectoryCsv(const std::string& path,
                        const std::vector<Trajectory<double>>& per_robot) {
  if (per_robot.empty()) {
    throw std::invalid_argument("writeTrajectoryCsv: no trajectories");
  }
  const Index n = per_robot.front().stateDim();
  const Index m = per_robot.front().controlDim();
  for (const auto& traj : per_robot) {
    if (traj.stateDim() != n || traj.controlDim() != m ||
        traj.dt != per_robot.front().dt) {
      throw std::invalid_argument("writeTrajectoryCsv: robots must share dimensions and dt");
    }
  }

  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write " + path);
  out << "# dt " << formatDouble(per_robot.front().dt) << "\n";
  out << "t,robot_id";
  for (Index i = 0; i < n; ++i) out << ",x" << i;
  for (Index i = 0; i < m; ++i) out << ",u" << i;
  out << "\n";
  for (std::size_t r = 0; r < per_robot.size(); ++r) {
    const auto& traj = per_robot[r];
    for (Index t = 0; t < traj.horizon(); ++t) {
      out << t << "," << r;
      for (Index i = 0; i < n; ++i) out << "," << formatDouble(traj.states(t, i));
      for (Index i = 0; i < m; ++i) {
        const double u = t + 1 < traj.horizon() ? traj.controls(t, i) : 0.0;
        out << "," << formatDouble(u);
      }
      out << "\n";
    }
  }
}

std::vector<Trajectory<double>> readTrajectoryCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path);

  std::string line;
  double dt = 0.0;
  bool have_dt = false;
  Index n = -1, m = -1;
  std::map<long, std::vector<std::vector<double>>> rows;  // robot -> rows

  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto at = path + ":" + std::to_string(line_no);
    if (line[0] == '#') {
      std::istringstream ss(line);
      std::string hash, key;
      ss >> hash >> key;
      if (key == "dt" && (ss >> dt)) have_dt = true;
      continue;
    }
    if (line[0] == 't') {  // header: count x / u columns
      n = m = 0;
      std::istringstream ss(line);
      std::string col;
      while (std::getline(ss, col, ',')) {
        if (col.size() > 1 && col[0] == 'x') ++n;
        if (col.size() > 1 && col[0] == 'u') ++m;
      }
      if (n < 1 || m < 1) throw ScenarioError(at + ": malformed header");
      continue;
    }
    if (n < 0) throw ScenarioError(at + ": data before header");
    std::istringstream ss(line);
    std::vector<double> fields;
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        fields.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ScenarioError(at + ": bad number '" + tok + "'");
      }
    }
    if (static_cast<Index>(fields.size()) != 2 + n + m) {
      throw ScenarioError(at + ": expected " + std::to_string(2 + n + m) + " fields");
    }
    rows[static_cast<long>(fields[1])].push_back(std::move(fields));
  }
  if (!have_dt) throw ScenarioError(path + ": missing '# dt' line");
  if (rows.empty()) throw ScenarioError(path + ": no data rows");

  std::vector<Trajectory<double>> out;
  for (auto& [robot, data] : rows) {
    const Index T = static_cast<Index>(data.size());
    if (T < 2) throw ScenarioError(path + ": robot " + std::to_string(robot) +
                                   " has fewer than two states");
    Trajectory<double> traj;
    traj.dt = dt;
    traj.states.resize(T, n);
    traj.controls.resize(T - 1, m);
    for (Index t = 0; t < T; ++t) {
      if (static_cast<Index>(data[t][0]) != t) {
        throw ScenarioError(path + ": robot " + std::to_string(robot) +
                            " rows out of order");
      }
      for (Index i = 0; i < n; ++i) traj.states(t, i) = data[t][2 + i];
      if (t + 1 < T) {
        for (Index i = 0; i < m; ++i) traj.controls(t, i) = data[t][2 + n + i];
      }
    }
    out.push_back(std::move(traj));
  }
  return out;
}

void writeCoverageCsv(const std::string& path, const FourierBasis<double>& basis,
                      const VectorX<double>& trajectory_coefficients,
                      const VectorX<double>& target_coefficients) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write " + path);
  const Index v = basis.dim();
  for (Index i = 0; i < v; ++i) out << "k" << i << ",";
  out << "lambda,c_k,phi_k,abs_diff\n";
  for (Index mode = 0; mode < basis.modeCount(); ++mode) {
    for (Index i = 0; i < v; ++i) out << basis.modes()(mode, i) << ",";
    out << formatDouble(basis.weights()(mode)) << ","
        << formatDouble(trajectory_coefficients(mode)) << ","
        << formatDouble(target_coefficients(mode)) << ","
        << formatDouble(std::abs(trajectory_coefficients(mode) -
                                 target_coefficients(mode)))
        << "\n";
  }
}

void writeTrialsCsv(const std::string& path, const MonteCarloResult<double>& result) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write " + path);
  if (result.trials.empty()) throw std::invalid_argument("writeTrialsCsv: no trials");

  const Index v = result.trials.front().start.size();
  const std::size_t n_obs = result.trials.front().first_violation_time.size();
  out << "trial,mode";
  for (Index i = 0; i < v; ++i) out << ",start" << i;
  for (Index i = 0; i < v; ++i) out << ",goal" << i;
  out << ",converged,plan_metric,plan_min_h,executed_min_h,tracking_rms,collided,success";
  for (std::size_t j = 0; j < n_obs; ++j) out << ",first_violation_s_" << j;
  out << "\n";

  for (const auto& t : result.trials) {
    out << t.trial << "," << toString(t.mode);
    for (Index i = 0; i < v; ++i) out << "," << formatDouble(t.start(i));
    for (Index i = 0; i < v; ++i) out << "," << formatDouble(t.goal(i));
    out << "," << (t.solver_converged ? 1 : 0) << "," << formatDouble(t.plan_metric)
        << "," << formatDouble(t.plan_min_h) << "," << formatDouble(t.executed_min_h)
        << "," << formatDouble(t.tracking_rms) << "," << (t.collided ? 1 : 0) << ","
        << (t.success ? 1 : 0);
    for (const auto& fv : t.first_violation_time) {
      out << ",";
      if (fv.has_value()) out << formatDouble(*fv);
    }
    out << "\n";
  }
}

void writeModeSummaryCsv(const std::string& path,
                         const MonteCarloResult<double>& result) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write " + path);
  out << "mode,trials,converged,successes,success_rate,success_rate_converged\n";
  for (const auto& s : result.summary) {
    out << toString(s.mode) << "," << s.trials << "," << s.converged << ","
        << s.successes << "," << formatDouble(s.success_rate) << ","
        << formatDouble(s.success_rate_converged) << "\n";
  }
}

void writeGammaSweepCsv(const std::string& path,
                        const std::vector<GammaResult<double>>& sweep) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write " + path);
  out << "gamma,metric,min_h,converged\n";
  for (const auto& r : sweep) {
    out << formatDouble(r.gamma) << "," << formatDouble(r.metric) << ","
        << formatDouble(r.min_h) << "," << (r.converged ? 1 : 0) << "\n";
  }
}

}  // namespace ergosafe::io
