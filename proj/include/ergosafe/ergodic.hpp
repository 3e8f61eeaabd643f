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

#ifndef ERGOSAFE_ERGODIC_HPP
#define ERGOSAFE_ERGODIC_HPP

#include <stdexcept>
#include <utility>

#include "ergosafe/basis.hpp"
#include "ergosafe/trajectory.hpp"
#include "ergosafe/types.hpp"

namespace ergosafe {

/// Weighted squared mismatch between a trajectory's time-averaged Fourier
/// coefficients and a target measure's coefficients:
///
///   E(x) = sum_k Lambda_k (c_k(x) - phi_k)^2
///
/// For a stacked multi-robot system the coefficients pool all robots'
/// workspace visits: c_k = (1/(N*T)) sum_r sum_t F_k(g_r(x_t)). Projected
/// points are clamped into the workspace before evaluation and the gradient
/// is zeroed in clamped directions.
///
/// Per-robot sums are accumulated separately and combined afterwards, so the
/// evaluation is exactly symmetric under swapping two robots' blocks.
template <typename Scalar>
class ErgodicObjective {
 public:
  using ProjectFn = typename Dynamics<Scalar>::ProjectFn;
  using PullbackFn = typename Dynamics<Scalar>::PullbackFn;

  ErgodicObjective(FourierBasis<Scalar> basis, VectorX<Scalar> target,
                   ProjectFn project, PullbackFn pullback, Index num_robots = 1)
      : basis_(std::move(basis)),
        target_(std::move(target)),
        project_(std::move(project)),
        pullback_(std::move(pullback)),
        num_robots_(num_robots) {
    if (target_.size() != basis_.modeCount()) {
      throw std::invalid_argument("ErgodicObjective: target coefficient count mismatch");
    }
    if (num_robots_ < 1) {
      throw std::invalid_argument("ErgodicObjective: need at least one robot");
    }
  }

  const FourierBasis<Scalar>& basis() const { return basis_; }
  const VectorX<Scalar>& target() const { return target_; }
  Index numRobots() const { return num_robots_; }

  /// Pooled trajectory coefficients of a state matrix (rows are states).
  VectorX<Scalar> coefficients(const Eigen::Ref<const MatrixX<Scalar>>& states) const {
    Buffers buf;
    projectAndClamp(states, buf);
    return pooledCoefficients(buf);
  }

  Scalar metric(const Trajectory<Scalar>& traj) const {
    return metricWithGradient(traj.states, nullptr);
  }

  /// Returns E and, when grad_states is non-null, fills it with dE/dx_t
  /// (same shape as states).
  Scalar metricWithGradient(const Eigen::Ref<const MatrixX<Scalar>>& states,
                            MatrixX<Scalar>* grad_states) const {
    Buffers buf;
    projectAndClamp(states, buf);
    const VectorX<Scalar> c = pooledCoefficients(buf);
    const VectorX<Scalar> diff = c - target_;
    const Scalar value = (basis_.weights().array() * diff.array().square()).sum();
    if (grad_states == nullptr) return value;

    const Index T = states.rows();
    const Index v = basis_.dim();
    const Index points = num_robots_ * T;
    // dE/dc_k expanded through the pooled average.
    const VectorX<Scalar> chain =
        (Scalar(2) / Scalar(points)) * (basis_.weights().array() * diff.array()).matrix();

    grad_states->resize(states.rows(), states.cols());
    MatrixX<Scalar> gk(basis_.modeCount(), v);
    VectorX<Scalar> dw(num_robots_ * v);
    for (Index t = 0; t < T; ++t) {
      for (Index r = 0; r < num_robots_; ++r) {
        basis_.gradAll(buf.clamped.row(t).segment(r * v, v).transpose(), gk);
        VectorX<Scalar> dwr = gk.transpose() * chain;
        for (Index i = 0; i < v; ++i) {
          if (!buf.interior(t, r * v + i)) dwr(i) = Scalar(0);
        }
        dw.segment(r * v, v) = dwr;
      }
      grad_states->row(t) =
          pullback_(states.row(t).transpose(), dw).transpose();
    }
    return value;
  }

 private:
  struct Buffers {
    MatrixX<Scalar> clamped;                      // T x (N*v)
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> interior;  // T x (N*v)
  };

  void projectAndClamp(const Eigen::Ref<const MatrixX<Scalar>>& states,
                       Buffers& buf) const {
    const Index T = states.rows();
    const Index v = basis_.dim();
    buf.clamped.resize(T, num_robots_ * v);
    buf.interior.resize(T, num_robots_ * v);
    const VectorX<Scalar>& L = basis_.workspace().extents();
    for (Index t = 0; t < T; ++t) {
      const VectorX<Scalar> w = project_(states.row(t).transpose());
      if (w.size() != num_robots_ * v) {
        throw std::invalid_argument("ErgodicObjective: projection dimension mismatch");
      }
      for (Index r = 0; r < num_robots_; ++r) {
        for (Index i = 0; i < v; ++i) {
          const Scalar wi = w(r * v + i);
          const bool inside = wi >= Scalar(0) && wi <= L(i);
          buf.interior(t, r * v + i) = inside;
          buf.clamped(t, r * v + i) =
              inside ? wi : (wi < Scalar(0) ? Scalar(0) : L(i));
        }
      }
    }
  }

  VectorX<Scalar> pooledCoefficients(const Buffers& buf) const {
    const Index T = buf.clamped.rows();
    const Index v = basis_.dim();
    VectorX<Scalar> c = VectorX<Scalar>::Zero(basis_.modeCount());
    VectorX<Scalar> fk(basis_.modeCount());
    for (Index r = 0; r < num_robots_; ++r) {
      VectorX<Scalar> cr = VectorX<Scalar>::Zero(basis_.modeCount());
      for (Index t = 0; t < T; ++t) {
        basis_.evalAll(buf.clamped.row(t).segment(r * v, v).transpose(), fk);
        cr += fk;
      }
      c += cr / Scalar(T);
    }
    return c / Scalar(num_robots_);
  }

  FourierBasis<Scalar> basis_;
  VectorX<Scalar> target_;
  ProjectFn project_;
  PullbackFn pullback_;
  Index num_robots_;
};

/// Builds the objective for a dynamics/measure pair; the number of robots is
/// inferred from the stacked workspace dimension.
template <typename Scalar>
ErgodicObjective<Scalar> makeErgodicObjective(const FourierBasis<Scalar>& basis,
                                              const SpatialMeasure<Scalar>& measure,
                                              const Dynamics<Scalar>& dynamics) {
  if (dynamics.workspace_dim % basis.dim() != 0) {
    throw std::invalid_argument(
        "makeErgodicObjective: stacked workspace dimension is not a multiple of the basis dimension");
  }
  const Index num_robots = dynamics.workspace_dim / basis.dim();
  return ErgodicObjective<Scalar>(basis, measureCoefficients(basis, measure),
                                  dynamics.project, dynamics.project_pullback,
                                  num_robots);
}

}  // namespace ergosafe

#endif  // ERGOSAFE_ERGODIC_HPP
