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

#ifndef ERGOSAFE_IO_CSV_HPP
#define ERGOSAFE_IO_CSV_HPP

#include <string>
#include <vector>

#include "ergosafe/ergosafe.hpp"

namespace ergosafe::io {

/// Shortest exact decimal form of a double (17 significant digits).
std::string formatDouble(double v);

/// trajectory.csv: one `# dt <value>` comment line, a header, then rows
/// t,robot_id,x0..,u0.. — the final step of each robot carries zero
/// controls (only T-1 controls exist).
void writeTrajectoryCsv(const std::string& path,
                        const std::vector<Trajectory<double>>& per_robot);

/// Inverse of writeTrajectoryCsv.
std::vector<Trajectory<double>> readTrajectoryCsv(const std::string& path);

/// coverage.csv: per Fourier mode k, the weight, trajectory and target
/// coefficients, and their absolute difference.
void writeCoverageCsv(const std::string& path, const FourierBasis<double>& basis,
                      const VectorX<double>& trajectory_coefficients,
                      const VectorX<double>& target_coefficients);

/// trials.csv: one row per (trial, mode) Monte-Carlo outcome.
void writeTrialsCsv(const std::string& path, const MonteCarloResult<double>& result);

/// summary.csv: one row per mode with counts and success rates.
void writeModeSummaryCsv(const std::string& path,
                         const MonteCarloResult<double>& result);

/// gamma_sweep.csv: gamma, metric, min_h, converged.
void writeGammaSweepCsv(const std::string& path,
                        const std::vector<GammaResult<double>>& sweep);

}  // namespace ergosafe::io

#endif  // ERGOSAFE_IO_CSV_HPP
