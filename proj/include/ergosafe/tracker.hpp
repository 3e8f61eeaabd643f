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

#ifndef ERGOSAFE_TRACKER_HPP
#define ERGOSAFE_TRACKER_HPP

#include <stdexcept>

#include "ergosafe/rng.hpp"
#include "ergosafe/trajectory.hpp"
#include "ergosafe/types.hpp"

namespace ergosafe {

/// PID waypoint tracker with bounded actuation noise. `substeps` controller
/// updates run per plan step; `feedthrough` bypasses the controller entirely
/// (executed path equals the plan), which is the exact-tracking baseline.
template <typename Scalar>
struct TrackerConfig {
  VectorX<Scalar> kp, ki, kd;   // per workspace axis
  Scalar noise_bound = Scalar(0.05);  // m/s per axis, uniform in [-b, b]
  Index substeps = 10;
  bool feedthrough = false;
  std::uint64_t seed = 0;

  static TrackerConfig defaults(Index axes) {
    TrackerConfig tc;
    tc.kp = VectorX<Scalar>::Constant(axes, Scalar(5));
    tc.ki = VectorX<Scalar>::Constant(axes, Scalar(0.1));
    tc.kd = VectorX<Scalar>::Constant(axes, Scalar(0.5));
    return tc;
  }

  static TrackerConfig exact() {
    TrackerConfig tc;
    tc.feedthrough = true;
    tc.noise_bound = Scalar(0);
    return tc;
  }

  /// Invariants for an actual tracking study: positive proportional gains.
  void validate() const {
    if (feedthrough) return;
    if (kp.size() == 0 || (kp.array() <= Scalar(0)).any()) {
      throw std::invalid_argument("TrackerConfig: k_p must be positive");
    }
    if ((ki.array() < Scalar(0)).any() || (kd.array() < Scalar(0)).any()) {
      throw std::invalid_argument("TrackerConfig: k_i and k_d must be non-negative");
    }
    if (noise_bound < Scalar(0)) {
      throw std::invalid_argument("TrackerConfig: noise bound must be non-negative");
    }
    if (substeps < 1) {
      throw std::invalid_argument("TrackerConfig: substeps must be >= 1");
    }
  }
};

/// Simulates the robot chasing the plan waypoint by waypoint. During plan
/// step t the reference is the next waypoint g(x_{t+1}); the controller runs
/// at dt/substeps with per-axis PID plus injected uniform noise. The result
/// is the fine-grained executed trajectory (dt/substeps timestep).
/// Deterministic given the seed.
template <typename Scalar>
Trajectory<Scalar> track(const Trajectory<Scalar>& plan,
                         const Dynamics<Scalar>& dynamics,
                         const TrackerConfig<Scalar>& tc) {
  if (tc.feedthrough) return plan;

  const Index v = dynamics.workspace_dim;
  if (dynamics.control_dim != v) {
    throw std::invalid_argument("track: controller needs one control per workspace axis");
  }
  if (tc.kp.size() != v || tc.ki.size() != v || tc.kd.size() != v) {
    throw std::invalid_argument("track: gain dimension mismatch");
  }
  if (tc.substeps < 1 || tc.noise_bound < Scalar(0)) {
    throw std::invalid_argument("track: bad substeps or noise bound");
  }

  const Index T = plan.horizon();
  const Scalar dt_sub = plan.dt / Scalar(tc.substeps);
  const Index steps = (T - 1) * tc.substeps;

  Trajectory<Scalar> exec;
  exec.dt = dt_sub;
  exec.states.resize(steps + 1, plan.stateDim());
  exec.controls.resize(steps, v);

  SplitMix64 rng(tc.seed);
  VectorX<Scalar> x = plan.states.row(0).transpose();
  VectorX<Scalar> integral = VectorX<Scalar>::Zero(v);
  VectorX<Scalar> prev_err =
      dynamics.project(plan.states.row(1).transpose()) - dynamics.project(x);
  exec.states.row(0) = x.transpose();

  Index row = 0;
  for (Index t = 0; t + 1 < T; ++t) {
    const VectorX<Scalar> target =
        dynamics.project(plan.states.row(t + 1).transpose());
    for (Index s = 0; s < tc.substeps; ++s) {
      const VectorX<Scalar> err = target - dynamics.project(x);
      integral += err * dt_sub;
      const VectorX<Scalar> deriv = (err - prev_err) / dt_sub;
      VectorX<Scalar> u = tc.kp.cwiseProduct(err) +
                          tc.ki.cwiseProduct(integral) +
                          tc.kd.cwiseProduct(deriv);
      for (Index i = 0; i < v; ++i) {
        u(i) += tc.noise_bound * Scalar(rng.symmetric());
      }
      if (dynamics.bounded()) {
        u = u.cwiseMax(dynamics.control_lower).cwiseMin(dynamics.control_upper);
      }
      prev_err = err;
      x = dynamics.step(x, u, dt_sub);
      exec.controls.row(row) = u.transpose();
      exec.states.row(row + 1) = x.transpose();
      ++row;
    }
  }
  return exec;
}

/// RMS position error between the executed path (fine-grained, `substeps`
/// rows per plan step) and the plan at the plan's sample times.
template <typename Scalar>
Scalar trackingRms(const Trajectory<Scalar>& plan, const Trajectory<Scalar>& exec,
                   const Dynamics<Scalar>& dynamics, Index substeps) {
  if (substeps < 1) {
    throw std::invalid_argument("trackingRms: substeps must be >= 1");
  }
  const Index T = plan.horizon();
  Scalar total = Scalar(0);
  Index count = 0;
  for (Index t = 0; t < T; ++t) {
    const Index row = t * substeps;
    const VectorX<Scalar> diff =
        dynamics.project(exec.states.row(row).transpose()) -
        dynamics.project(plan.states.row(t).transpose());
    total += diff.squaredNorm();
    count += diff.size();
  }
  return std::sqrt(total / Scalar(count));
}

}  // namespace ergosafe

#endif  // ERGOSAFE_TRACKER_HPP
