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

#ifndef ERGOSAFE_DYNAMICS_HPP
#define ERGOSAFE_DYNAMICS_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include "ergosafe/types.hpp"

namespace ergosafe {

/// Discrete-time control system together with the adjoint-mode Jacobian
/// products the shooting optimizer needs, and the map g from states to
/// workspace points.
///
/// All callables must be deterministic: identical inputs give identical
/// outputs. `project` returns the stacked workspace point of dimension
/// `workspace_dim` (a multiple of the per-robot workspace dimension when
/// several robots are stacked into one system).
template <typename Scalar>
struct Dynamics {
  using Vector = VectorX<Scalar>;
  using StepFn = std::function<Vector(const Vector& x, const Vector& u, Scalar dt)>;
  using AdjointFn =
      std::function<Vector(const Vector& x, const Vector& u, Scalar dt, const Vector& cotangent)>;
  using ProjectFn = std::function<Vector(const Vector& x)>;
  using PullbackFn = std::function<Vector(const Vector& x, const Vector& cotangent)>;

  Index state_dim = 0;
  Index control_dim = 0;
  Index workspace_dim = 0;

  StepFn step;                   // x_{t+1} = f(x_t, u_t)
  AdjointFn step_adjoint_state;  // (df/dx)^T * cotangent
  AdjointFn step_adjoint_control;  // (df/du)^T * cotangent
  ProjectFn project;             // g(x)
  PullbackFn project_pullback;   // (dg/dx)^T * cotangent

  // Per-axis control bounds; empty vectors mean unbounded.
  Vector control_lower;
  Vector control_upper;

  bool bounded() const { return control_lower.size() > 0; }
};

/// Point-robot dynamics x_{t+1} = x_t + u_t * dt with n = m = dim and
/// g = identity.
template <typename Scalar>
Dynamics<Scalar> singleIntegrator(Index dim) {
  if (dim < 1) {
    throw std::invalid_argument("singleIntegrator: dimension must be >= 1");
  }
  using Vector = VectorX<Scalar>;
  Dynamics<Scalar> d;
  d.state_dim = dim;
  d.control_dim = dim;
  d.workspace_dim = dim;
  d.step = [](const Vector& x, const Vector& u, Scalar dt) -> Vector {
    return x + u * dt;
  };
  d.step_adjoint_state = [](const Vector&, const Vector&, Scalar,
                            const Vector& cot) -> Vector { return cot; };
  d.step_adjoint_control = [](const Vector&, const Vector&, Scalar dt,
                              const Vector& cot) -> Vector { return cot * dt; };
  d.project = [](const Vector& x) -> Vector { return x; };
  d.project_pullback = [](const Vector&, const Vector& cot) -> Vector {
    return cot;
  };
  return d;
}

/// Applies symmetric per-axis speed bounds |u_i| <= bound.
template <typename Scalar>
Dynamics<Scalar> withControlBound(Dynamics<Scalar> d, Scalar bound) {
  if (bound <= Scalar(0)) {
    throw std::invalid_argument("withControlBound: bound must be positive");
  }
  d.control_lower = VectorX<Scalar>::Constant(d.control_dim, -bound);
  d.control_upper = VectorX<Scalar>::Constant(d.control_dim, bound);
  return d;
}

/// Block-diagonal composition of N systems. States, controls and workspace
/// points are concatenated in robot order; every callable acts block-wise so
/// no arithmetic crosses robot boundaries.
template <typename Scalar>
Dynamics<Scalar> stackDynamics(const std::vector<Dynamics<Scalar>>& parts) {
  if (parts.empty()) {
    throw std::invalid_argument("stackDynamics: need at least one system");
  }
  using Vector = VectorX<Scalar>;

  struct Offsets {
    std::vector<Index> x, u, w;
    Index n = 0, m = 0, v = 0;
  };
  Offsets off;
  for (const auto& p : parts) {
    off.x.push_back(off.n);
    off.u.push_back(off.m);
    off.w.push_back(off.v);
    off.n += p.state_dim;
    off.m += p.control_dim;
    off.v += p.workspace_dim;
  }

  Dynamics<Scalar> d;
  d.state_dim = off.n;
  d.control_dim = off.m;
  d.workspace_dim = off.v;

  auto systems = parts;  // captured by value
  d.step = [systems, off](const Vector& x, const Vector& u, Scalar dt) -> Vector {
    Vector out(off.n);
    for (std::size_t r = 0; r < systems.size(); ++r) {
      out.segment(off.x[r], systems[r].state_dim) =
          systems[r].step(x.segment(off.x[r], systems[r].state_dim),
                          u.segment(off.u[r], systems[r].control_dim), dt);
    }
    return out;
  };
  d.step_adjoint_state = [systems, off](const Vector& x, const Vector& u,
                                        Scalar dt, const Vector& cot) -> Vector {
    Vector out(off.n);
    for (std::size_t r = 0; r < systems.size(); ++r) {
      out.segment(off.x[r], systems[r].state_dim) = systems[r].step_adjoint_state(
          x.segment(off.x[r], systems[r].state_dim),
          u.segment(off.u[r], systems[r].control_dim), dt,
          cot.segment(off.x[r], systems[r].state_dim));
    }
    return out;
  };
  d.step_adjoint_control = [systems, off](const Vector& x, const Vector& u,
                                          Scalar dt, const Vector& cot) -> Vector {
    Vector out(off.m);
    for (std::size_t r = 0; r < systems.size(); ++r) {
      out.segment(off.u[r], systems[r].control_dim) =
          systems[r].step_adjoint_control(
              x.segment(off.x[r], systems[r].state_dim),
              u.segment(off.u[r], systems[r].control_dim), dt,
              cot.segment(off.x[r], systems[r].state_dim));
    }
    return out;
  };
  d.project = [systems, off](const Vector& x) -> Vector {
    Vector out(off.v);
    for (std::size_t r = 0; r < systems.size(); ++r) {
      out.segment(off.w[r], systems[r].workspace_dim) =
          systems[r].project(x.segment(off.x[r], systems[r].state_dim));
    }
    return out;
  };
  d.project_pullback = [systems, off](const Vector& x, const Vector& cot) -> Vector {
    Vector out(off.n);
    for (std::size_t r = 0; r < systems.size(); ++r) {
      out.segment(off.x[r], systems[r].state_dim) = systems[r].project_pullback(
          x.segment(off.x[r], systems[r].state_dim),
          cot.segment(off.w[r], systems[r].workspace_dim));
    }
    return out;
  };

  bool any_bounded = false;
  for (const auto& p : parts) any_bounded = any_bounded || p.bounded();
  if (any_bounded) {
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    d.control_lower = Vector::Constant(off.m, -inf);
    d.control_upper = Vector::Constant(off.m, inf);
    for (std::size_t r = 0; r < parts.size(); ++r) {
      if (parts[r].bounded()) {
        d.control_lower.segment(off.u[r], parts[r].control_dim) =
            parts[r].control_lower;
        d.control_upper.segment(off.u[r], parts[r].control_dim) =
            parts[r].control_upper;
      }
    }
  }
  return d;
}

}  // namespace ergosafe

#endif  // ERGOSAFE_DYNAMICS_HPP
