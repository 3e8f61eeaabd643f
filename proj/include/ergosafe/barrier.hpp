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

#ifndef ERGOSAFE_BARRIER_HPP
#define ERGOSAFE_BARRIER_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ergosafe/trajectory.hpp"
#include "ergosafe/types.hpp"

namespace ergosafe {

/// Scaled p-norm distance barrier around an obstacle:
///
///   h(w) = || (w - center) / (scale + buffer) ||_p - radius
///
/// Negative inside the inflated obstacle, zero on its boundary, positive
/// outside. p = 2 gives ellipses; larger p approaches a box.
template <typename Scalar>
class Superellipsoid {
 public:
  Superellipsoid(VectorX<Scalar> center, VectorX<Scalar> scale, Scalar buffer,
                 Scalar radius, Scalar p)
      : center_(std::move(center)),
        scale_(std::move(scale)),
        buffer_(buffer),
        radius_(radius),
        p_(p) {
    if (scale_.size() != center_.size()) {
      throw std::invalid_argument("Superellipsoid: center/scale dimension mismatch");
    }
    if (((scale_.array() + buffer_) <= Scalar(0)).any()) {
      throw std::invalid_argument("Superellipsoid: scale + buffer must be positive");
    }
    if (buffer_ < Scalar(0)) {
      throw std::invalid_argument("Superellipsoid: buffer must be non-negative");
    }
    if (radius_ <= Scalar(0)) {
      throw std::invalid_argument("Superellipsoid: radius must be positive");
    }
    if (p_ < Scalar(2)) {
      throw std::invalid_argument("Superellipsoid: norm order must be >= 2");
    }
  }

  Index dim() const { return center_.size(); }
  const VectorX<Scalar>& center() const { return center_; }
  const VectorX<Scalar>& scale() const { return scale_; }
  Scalar buffer() const { return buffer_; }
  Scalar radius() const { return radius_; }
  Scalar normOrder() const { return p_; }

  Scalar value(const Eigen::Ref<const VectorX<Scalar>>& w) const {
    const VectorX<Scalar> z =
        (w - center_).array() / (scale_.array() + buffer_);
    if (p_ == Scalar(2)) return z.norm() - radius_;
    Scalar s = Scalar(0);
    for (Index i = 0; i < z.size(); ++i) {
      s += std::pow(std::abs(z(i)), p_);
    }
    return std::pow(s, Scalar(1) / p_) - radius_;
  }

  /// Analytic gradient of the scaled p-norm. Exactly at the center the norm
  /// is not differentiable; a zero vector is returned and *degenerate (when
  /// given) is set.
  VectorX<Scalar> gradient(const Eigen::Ref<const VectorX<Scalar>>& w,
                           bool* degenerate = nullptr) const {
    if (degenerate != nullptr) *degenerate = false;
    const VectorX<Scalar> inv_len =
        (scale_.array() + buffer_).inverse().matrix();
    const VectorX<Scalar> z = (w - center_).cwiseProduct(inv_len);
    if (p_ == Scalar(2)) {
      const Scalar norm = z.norm();
      if (norm == Scalar(0)) {
        if (degenerate != nullptr) *degenerate = true;
        return VectorX<Scalar>::Zero(dim());
      }
      return (z / norm).cwiseProduct(inv_len);
    }
    Scalar s = Scalar(0);
    for (Index i = 0; i < z.size(); ++i) {
      s += std::pow(std::abs(z(i)), p_);
    }
    if (s == Scalar(0)) {
      if (degenerate != nullptr) *degenerate = true;
      return VectorX<Scalar>::Zero(dim());
    }
    const Scalar outer = std::pow(s, Scalar(1) / p_ - Scalar(1));
    VectorX<Scalar> g(dim());
    for (Index i = 0; i < dim(); ++i) {
      const Scalar zi = z(i);
      const Scalar mag = std::pow(std::abs(zi), p_ - Scalar(1));
      g(i) = outer * (zi >= Scalar(0) ? mag : -mag) * inv_len(i);
    }
    return g;
  }

 private:
  VectorX<Scalar> center_;
  VectorX<Scalar> scale_;
  Scalar buffer_;
  Scalar radius_;
  Scalar p_;
};

/// Minimum-separation barrier between two robots:
///   h(w_i, w_j) = ||w_i - w_j||_2 - min_separation.
template <typename Scalar>
class PairwiseBarrier {
 public:
  PairwiseBarrier(Index robot_i, Index robot_j, Scalar min_separation)
      : robot_i_(robot_i), robot_j_(robot_j), min_separation_(min_separation) {
    if (robot_i_ == robot_j_) {
      throw std::invalid_argument("PairwiseBarrier: robot indices must differ");
    }
    if (robot_i_ < 0 || robot_j_ < 0) {
      throw std::invalid_argument("PairwiseBarrier: robot indices must be non-negative");
    }
    if (min_separation_ <= Scalar(0)) {
      throw std::invalid_argument("PairwiseBarrier: separation must be positive");
    }
  }

  Index robotI() const { return robot_i_; }
  Index robotJ() const { return robot_j_; }
  Scalar minSeparation() const { return min_separation_; }

  Scalar value(const Eigen::Ref<const VectorX<Scalar>>& wi,
               const Eigen::Ref<const VectorX<Scalar>>& wj) const {
    return (wi - wj).norm() - min_separation_;
  }

  /// Gradient with respect to w_i; the gradient with respect to w_j is its
  /// negative. Zero with the degeneracy flag set when the points coincide.
  VectorX<Scalar> gradient(const Eigen::Ref<const VectorX<Scalar>>& wi,
                           const Eigen::Ref<const VectorX<Scalar>>& wj,
                           bool* degenerate = nullptr) const {
    if (degenerate != nullptr) *degenerate = false;
    const VectorX<Scalar> diff = wi - wj;
    const Scalar norm = diff.norm();
    if (norm == Scalar(0)) {
      if (degenerate != nullptr) *degenerate = true;
      return VectorX<Scalar>::Zero(wi.size());
    }
    return diff / norm;
  }

 private:
  Index robot_i_;
  Index robot_j_;
  Scalar min_separation_;
};

/// One barrier together with its decay rate gamma in (0, 1]. The barrier is
/// evaluated on the stacked workspace point (all robots' workspace
/// coordinates concatenated); `robot` selects the slice an obstacle barrier
/// applies to.
template <typename Scalar>
struct DcbfConstraint {
  using Barrier = std::variant<Superellipsoid<Scalar>, PairwiseBarrier<Scalar>>;

  DcbfConstraint(Superellipsoid<Scalar> obstacle, Scalar gamma_in,
                 Index robot_in = 0, std::string name_in = "")
      : barrier(std::move(obstacle)),
        gamma(gamma_in),
        robot(robot_in),
        name(std::move(name_in)) {
    checkGamma();
  }

  DcbfConstraint(PairwiseBarrier<Scalar> pair, Scalar gamma_in,
                 std::string name_in = "")
      : barrier(std::move(pair)), gamma(gamma_in), name(std::move(name_in)) {
    checkGamma();
  }

  Barrier barrier;
  Scalar gamma;
  Index robot = 0;
  std::string name;

  bool isPairwise() const {
    return std::holds_alternative<PairwiseBarrier<Scalar>>(barrier);
  }

  /// h evaluated on a stacked workspace point; per_robot_dim is the
  /// dimension of one robot's workspace slice.
  Scalar barrierValue(const Eigen::Ref<const VectorX<Scalar>>& w,
                      Index per_robot_dim) const {
    if (const auto* obs = std::get_if<Superellipsoid<Scalar>>(&barrier)) {
      return obs->value(w.segment(robot * per_robot_dim, per_robot_dim));
    }
    const auto& pair = std::get<PairwiseBarrier<Scalar>>(barrier);
    return pair.value(w.segment(pair.robotI() * per_robot_dim, per_robot_dim),
                      w.segment(pair.robotJ() * per_robot_dim, per_robot_dim));
  }

  /// dh/dw on the stacked workspace point (zeros outside the barrier's
  /// slices).
  VectorX<Scalar> barrierGradient(const Eigen::Ref<const VectorX<Scalar>>& w,
                                  Index per_robot_dim) const {
    VectorX<Scalar> g = VectorX<Scalar>::Zero(w.size());
    if (const auto* obs = std::get_if<Superellipsoid<Scalar>>(&barrier)) {
      g.segment(robot * per_robot_dim, per_robot_dim) =
          obs->gradient(w.segment(robot * per_robot_dim, per_robot_dim));
      return g;
    }
    const auto& pair = std::get<PairwiseBarrier<Scalar>>(barrier);
    const VectorX<Scalar> gi =
        pair.gradient(w.segment(pair.robotI() * per_robot_dim, per_robot_dim),
                      w.segment(pair.robotJ() * per_robot_dim, per_robot_dim));
    g.segment(pair.robotI() * per_robot_dim, per_robot_dim) = gi;
    g.segment(pair.robotJ() * per_robot_dim, per_robot_dim) = -gi;
    return g;
  }

 private:
  void checkGamma() const {
    if (!(gamma > Scalar(0) && gamma <= Scalar(1))) {
      throw std::invalid_argument("DcbfConstraint: gamma must lie in (0, 1]");
    }
  }
};

/// Residual of the discrete barrier condition between consecutive workspace
/// points: h(w_next) - (1 - gamma) h(w_t). Satisfied iff >= 0.
template <typename Scalar>
Scalar dcbfResidual(const DcbfConstraint<Scalar>& c,
                    const VectorRef<Scalar>& w_t,
                    const VectorRef<Scalar>& w_next,
                    Index per_robot_dim) {
  return c.barrierValue(w_next, per_robot_dim) -
         (Scalar(1) - c.gamma) * c.barrierValue(w_t, per_robot_dim);
}

template <typename Scalar>
Scalar dcbfResidualFromValues(Scalar gamma, Scalar h_t, Scalar h_next) {
  return h_next - (Scalar(1) - gamma) * h_t;
}

template <typename Scalar>
struct ConstraintAudit {
  std::string name;
  Scalar min_value = Scalar(0);      // min_t h
  Index min_value_index = 0;
  Scalar min_residual = Scalar(0);   // min_t of the DCBF residual
  std::optional<Index> first_violation;
  bool passed = false;
};

template <typename Scalar>
struct SafetyReport {
  std::vector<ConstraintAudit<Scalar>> constraints;
  Scalar min_value = Scalar(0);  // over all constraints
  bool passed = true;
};

/// Forward-invariance audit of a trajectory: per constraint, the minimum
/// barrier value, the minimum DCBF residual, and the first index violating
/// either h >= 0 or residual >= -residual_tol.
template <typename Scalar>
SafetyReport<Scalar> auditTrajectory(
    const std::vector<DcbfConstraint<Scalar>>& constraints,
    const Trajectory<Scalar>& traj,
    const typename Dynamics<Scalar>::ProjectFn& project, Index per_robot_dim,
    Scalar residual_tol = Scalar(1e-8)) {
  const Index T = traj.horizon();
  MatrixX<Scalar> points;
  for (Index t = 0; t < T; ++t) {
    const VectorX<Scalar> w = project(traj.states.row(t).transpose());
    if (t == 0) points.resize(T, w.size());
    points.row(t) = w.transpose();
  }

  SafetyReport<Scalar> report;
  report.min_value = std::numeric_limits<Scalar>::infinity();
  for (const auto& c : constraints) {
    ConstraintAudit<Scalar> audit;
    audit.name = c.name;
    audit.min_value = std::numeric_limits<Scalar>::infinity();
    audit.min_residual = std::numeric_limits<Scalar>::infinity();
    Scalar prev_h = Scalar(0);
    for (Index t = 0; t < T; ++t) {
      const Scalar h = c.barrierValue(points.row(t).transpose(), per_robot_dim);
      if (h < audit.min_value) {
        audit.min_value = h;
        audit.min_value_index = t;
      }
      bool violated = h < Scalar(0);
      if (t > 0) {
        const Scalar res = dcbfResidualFromValues(c.gamma, prev_h, h);
        audit.min_residual = std::min(audit.min_residual, res);
        violated = violated || res < -residual_tol;
      }
      if (violated && !audit.first_violation.has_value()) {
        audit.first_violation = t;
      }
      prev_h = h;
    }
    audit.passed = !audit.first_violation.has_value();
    report.passed = report.passed && audit.passed;
    report.min_value = std::min(report.min_value, audit.min_value);
    report.constraints.push_back(std::move(audit));
  }
  return report;
}

}  // namespace ergosafe

#endif  // ERGOSAFE_BARRIER_HPP
