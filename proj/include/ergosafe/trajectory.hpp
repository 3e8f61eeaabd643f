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

#ifndef ERGOSAFE_TRAJECTORY_HPP
#define ERGOSAFE_TRAJECTORY_HPP

#include <stdexcept>

#include "ergosafe/dynamics.hpp"
#include "ergosafe/types.hpp"

namespace ergosafe {

/// Discrete state/control sequence. Rows index time: states is T x n,
/// controls is (T-1) x m (the control applied at the final state is unused
/// by the rollout and not stored).
template <typename Scalar>
struct Trajectory {
  MatrixX<Scalar> states;
  MatrixX<Scalar> controls;
  Scalar dt = Scalar(0);

  Index horizon() const { return states.rows(); }
  Index stateDim() const { return states.cols(); }
  Index controlDim() const { return controls.cols(); }
  Scalar duration() const { return Scalar(horizon()) * dt; }
};

/// Integrates the dynamics from x0 under the given control rows.
/// The result satisfies states.row(t+1) = step(states.row(t), controls.row(t))
/// exactly.
template <typename Scalar>
Trajectory<Scalar> rollout(const Dynamics<Scalar>& dynamics,
                           const VectorRef<Scalar>& x0,
                           const MatrixRef<Scalar>& controls,
                           Scalar dt) {
  if (x0.size() != dynamics.state_dim) {
    throw std::invalid_argument("rollout: x0 dimension mismatch");
  }
  if (controls.cols() != dynamics.control_dim) {
    throw std::invalid_argument("rollout: control dimension mismatch");
  }
  if (controls.rows() < 1) {
    throw std::invalid_argument("rollout: need at least one control (T >= 2)");
  }
  if (dt <= Scalar(0)) {
    throw std::invalid_argument("rollout: dt must be positive");
  }

  const Index T = controls.rows() + 1;
  Trajectory<Scalar> traj;
  traj.dt = dt;
  traj.controls = controls;
  traj.states.resize(T, dynamics.state_dim);
  traj.states.row(0) = x0;
  VectorX<Scalar> x = x0;
  for (Index t = 0; t + 1 < T; ++t) {
    x = dynamics.step(x, controls.row(t).transpose(), dt);
    traj.states.row(t + 1) = x;
  }
  return traj;
}

}  // namespace ergosafe

#endif  // ERGOSAFE_TRAJECTORY_HPP
