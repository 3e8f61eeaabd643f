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

#ifndef ERGOSAFE_BASIS_HPP
#define ERGOSAFE_BASIS_HPP

#include <cmath>
#include <stdexcept>
#include <utility>

#include "ergosafe/trajectory.hpp"
#include "ergosafe/types.hpp"
#include "ergosafe/workspace.hpp"

namespace ergosafe {

/// Cosine Fourier basis over a rectangular workspace.
///
/// Modes k range over {0, ..., K-1}^v in lexicographic order (dimension 0
/// most significant). Each basis function is
///
///   F_k(w) = prod_i cos(w_i k_i pi / L_i) / h_k
///
/// with the L2 normalization h_k = sqrt(prod_i (k_i == 0 ? L_i : L_i/2)),
/// which makes {F_k} orthonormal over the workspace. The per-mode weights
/// Lambda_k = (1 + |k|^2)^(-(v+1)/2) emphasize large-scale coverage.
template <typename Scalar>
class FourierBasis {
 public:
  FourierBasis(Workspace<Scalar> workspace, Index modes_per_dim)
      : workspace_(std::move(workspace)), modes_per_dim_(modes_per_dim) {
    if (modes_per_dim_ < 1) {
      throw std::invalid_argument("FourierBasis: modes_per_dim must be >= 1");
    }
    const Index v = workspace_.dim();
    Index count = 1;
    for (Index i = 0; i < v; ++i) count *= modes_per_dim_;

    modes_.resize(count, v);
    VectorXi k = VectorXi::Zero(v);
    for (Index m = 0; m < count; ++m) {
      modes_.row(m) = k.transpose();
      for (Index i = v - 1; i >= 0; --i) {  // increment lexicographically
        if (++k(i) < modes_per_dim_) break;
        k(i) = 0;
      }
    }

    normalizations_.resize(count);
    weights_.resize(count);
    const Scalar exponent = -Scalar(v + 1) / Scalar(2);
    for (Index m = 0; m < count; ++m) {
      Scalar h2 = Scalar(1);
      Scalar ksq = Scalar(0);
      for (Index i = 0; i < v; ++i) {
        const Index ki = modes_(m, i);
        h2 *= (ki == 0) ? workspace_.extent(i) : workspace_.extent(i) / Scalar(2);
        ksq += Scalar(ki) * Scalar(ki);
      }
      normalizations_(m) = std::sqrt(h2);
      weights_(m) = std::pow(Scalar(1) + ksq, exponent);
    }
  }

  const Workspace<Scalar>& workspace() const { return workspace_; }
  Index dim() const { return workspace_.dim(); }
  Index modesPerDim() const { return modes_per_dim_; }
  Index modeCount() const { return modes_.rows(); }
  const MatrixXi& modes() const { return modes_; }
  const VectorX<Scalar>& normalizations() const { return normalizations_; }
  const VectorX<Scalar>& weights() const { return weights_; }

  void setWeights(VectorX<Scalar> weights) {
    if (weights.size() != modeCount() || (weights.array() <= Scalar(0)).any()) {
      throw std::invalid_argument("FourierBasis: weights must be positive, one per mode");
    }
    weights_ = std::move(weights);
  }

  /// Flat index of a multi-index mode; throws if any component is out of range.
  Index flatIndex(const Eigen::Ref<const VectorXi>& k) const {
    if (k.size() != dim()) {
      throw std::invalid_argument("FourierBasis: mode dimension mismatch");
    }
    Index flat = 0;
    for (Index i = 0; i < dim(); ++i) {
      if (k(i) < 0 || k(i) >= modes_per_dim_) {
        throw std::invalid_argument("FourierBasis: mode out of range");
      }
      flat = flat * modes_per_dim_ + k(i);
    }
    return flat;
  }

  /// F_k(w) for a single mode.
  Scalar eval(const Eigen::Ref<const VectorXi>& k,
              const Eigen::Ref<const VectorX<Scalar>>& w) const {
    const Index flat = flatIndex(k);
    Scalar prod = Scalar(1);
    for (Index i = 0; i < dim(); ++i) {
      prod *= std::cos(frequency(flat, i) * w(i));
    }
    return prod / normalizations_(flat);
  }

  /// Gradient of F_k with respect to w.
  VectorX<Scalar> grad(const Eigen::Ref<const VectorXi>& k,
                       const Eigen::Ref<const VectorX<Scalar>>& w) const {
    const Index flat = flatIndex(k);
    const Index v = dim();
    VectorX<Scalar> cosv(v), sinv(v), freq(v);
    for (Index i = 0; i < v; ++i) {
      freq(i) = frequency(flat, i);
      cosv(i) = std::cos(freq(i) * w(i));
      sinv(i) = std::sin(freq(i) * w(i));
    }
    VectorX<Scalar> g(v);
    for (Index i = 0; i < v; ++i) {
      Scalar rest = Scalar(1);
      for (Index j = 0; j < v; ++j) {
        if (j != i) rest *= cosv(j);
      }
      g(i) = -freq(i) * sinv(i) * rest / normalizations_(flat);
    }
    return g;
  }

  /// All mode values at one point; out must have modeCount() entries.
  void evalAll(const Eigen::Ref<const VectorX<Scalar>>& w,
               Eigen::Ref<VectorX<Scalar>> out) const {
    const Index v = dim();
    MatrixX<Scalar> ct(v, modes_per_dim_);
    for (Index i = 0; i < v; ++i) {
      const Scalar base = Scalar(EIGEN_PI) / workspace_.extent(i);
      for (Index ki = 0; ki < modes_per_dim_; ++ki) {
        ct(i, ki) = std::cos(Scalar(ki) * base * w(i));
      }
    }
    for (Index m = 0; m < modeCount(); ++m) {
      Scalar prod = Scalar(1);
      for (Index i = 0; i < v; ++i) prod *= ct(i, modes_(m, i));
      out(m) = prod / normalizations_(m);
    }
  }

  VectorX<Scalar> evalAll(const Eigen::Ref<const VectorX<Scalar>>& w) const {
    VectorX<Scalar> out(modeCount());
    evalAll(w, out);
    return out;
  }

  /// Gradients of all modes at one point, one row per mode.
  void gradAll(const Eigen::Ref<const VectorX<Scalar>>& w,
               Eigen::Ref<MatrixX<Scalar>> out) const {
    const Index v = dim();
    MatrixX<Scalar> ct(v, modes_per_dim_), st(v, modes_per_dim_);
    VectorX<Scalar> base(v);
    for (Index i = 0; i < v; ++i) {
      base(i) = Scalar(EIGEN_PI) / workspace_.extent(i);
      for (Index ki = 0; ki < modes_per_dim_; ++ki) {
        const Scalar a = Scalar(ki) * base(i) * w(i);
        ct(i, ki) = std::cos(a);
        st(i, ki) = std::sin(a);
      }
    }
    for (Index m = 0; m < modeCount(); ++m) {
      for (Index i = 0; i < v; ++i) {
        Scalar rest = Scalar(1);
        for (Index j = 0; j < v; ++j) {
          if (j != i) rest *= ct(j, modes_(m, j));
        }
        const Scalar freq = Scalar(modes_(m, i)) * base(i);
        out(m, i) = -freq * st(i, modes_(m, i)) * rest / normalizations_(m);
      }
    }
  }

  MatrixX<Scalar> gradAll(const Eigen::Ref<const VectorX<Scalar>>& w) const {
    MatrixX<Scalar> out(modeCount(), dim());
    gradAll(w, out);
    return out;
  }

 private:
  Scalar frequency(Index flat, Index i) const {
    return Scalar(modes_(flat, i)) * Scalar(EIGEN_PI) / workspace_.extent(i);
  }

  Workspace<Scalar> workspace_;
  Index modes_per_dim_;
  MatrixXi modes_;
  VectorX<Scalar> normalizations_;  // h_k
  VectorX<Scalar> weights_;         // Lambda_k
};

/// Target density over the workspace: uniform, or a piecewise-constant grid
/// (row-major over cells, dimension 0 slowest).
template <typename Scalar>
class SpatialMeasure {
 public:
  enum class Kind { Uniform, Grid };

  static SpatialMeasure uniform() { return SpatialMeasure(); }

  static SpatialMeasure grid(VectorXi cells_per_dim, VectorX<Scalar> densities) {
    if (cells_per_dim.size() < 1 || (cells_per_dim.array() < 1).any()) {
      throw std::invalid_argument("SpatialMeasure: grid needs >= 1 cell per dimension");
    }
    Index total = 1;
    for (Index i = 0; i < cells_per_dim.size(); ++i) total *= cells_per_dim(i);
    if (densities.size() != total) {
      throw std::invalid_argument("SpatialMeasure: density count does not match grid");
    }
    if ((densities.array() < Scalar(0)).any()) {
      throw std::invalid_argument("SpatialMeasure: densities must be non-negative");
    }
    SpatialMeasure m;
    m.kind_ = Kind::Grid;
    m.cells_ = std::move(cells_per_dim);
    m.densities_ = std::move(densities);
    return m;
  }

  Kind kind() const { return kind_; }
  const VectorXi& cells() const { return cells_; }
  const VectorX<Scalar>& densities() const { return densities_; }

  /// Integral of the density over the workspace (midpoint quadrature for
  /// grids; exactly 1 for the uniform measure).
  Scalar totalMass(const Workspace<Scalar>& ws) const {
    if (kind_ == Kind::Uniform) return Scalar(1);
    if (cells_.size() != ws.dim()) {
      throw std::invalid_argument("SpatialMeasure: grid dimension mismatch");
    }
    Scalar vol = Scalar(1);
    for (Index i = 0; i < ws.dim(); ++i) {
      vol *= ws.extent(i) / Scalar(cells_(i));
    }
    return densities_.sum() * vol;
  }

 private:
  SpatialMeasure() = default;
  Kind kind_ = Kind::Uniform;
  VectorXi cells_;
  VectorX<Scalar> densities_;
};

/// Spatial coefficients phi_k of a normalized measure.
///
/// Uniform measures are handled analytically (phi_0 = 1/h_0, all other modes
/// vanish); grid measures use midpoint quadrature over the cell centers.
/// Throws if the measure mass deviates from 1 by more than 1e-6.
template <typename Scalar>
VectorX<Scalar> measureCoefficients(const FourierBasis<Scalar>& basis,
                                    const SpatialMeasure<Scalar>& measure) {
  const Scalar mass = measure.totalMass(basis.workspace());
  if (std::abs(mass - Scalar(1)) > Scalar(1e-6)) {
    throw std::invalid_argument("measureCoefficients: measure is not normalized");
  }

  VectorX<Scalar> phi = VectorX<Scalar>::Zero(basis.modeCount());
  if (measure.kind() == SpatialMeasure<Scalar>::Kind::Uniform) {
    phi(0) = Scalar(1) / basis.normalizations()(0);
    return phi;
  }

  const Workspace<Scalar>& ws = basis.workspace();
  const Index v = ws.dim();
  const VectorXi& cells = measure.cells();
  VectorX<Scalar> cell_size(v);
  Scalar vol = Scalar(1);
  for (Index i = 0; i < v; ++i) {
    cell_size(i) = ws.extent(i) / Scalar(cells(i));
    vol *= cell_size(i);
  }

  VectorXi idx = VectorXi::Zero(v);
  VectorX<Scalar> center(v), fk(basis.modeCount());
  for (Index c = 0; c < measure.densities().size(); ++c) {
    for (Index i = 0; i < v; ++i) {
      center(i) = (Scalar(idx(i)) + Scalar(0.5)) * cell_size(i);
    }
    basis.evalAll(center, fk);
    phi += measure.densities()(c) * vol * fk;
    for (Index i = v - 1; i >= 0; --i) {
      if (++idx(i) < cells(i)) break;
      idx(i) = 0;
    }
  }
  return phi;
}

/// Time-averaged basis values over a set of workspace points (one row per
/// point, already inside the workspace): c_k = mean_p F_k(w_p).
template <typename Scalar>
VectorX<Scalar> pointCoefficients(const FourierBasis<Scalar>& basis,
                                  const MatrixRef<Scalar>& points) {
  if (points.cols() != basis.dim()) {
    throw std::invalid_argument("pointCoefficients: point dimension mismatch");
  }
  VectorX<Scalar> c = VectorX<Scalar>::Zero(basis.modeCount());
  VectorX<Scalar> fk(basis.modeCount());
  for (Index p = 0; p < points.rows(); ++p) {
    basis.evalAll(points.row(p).transpose(), fk);
    c += fk;
  }
  return c / Scalar(points.rows());
}

/// Trajectory coefficients c_k = (1/T) sum_t F_k(g(x_t)). Projected states
/// are clamped into the workspace before evaluation.
template <typename Scalar>
VectorX<Scalar> trajectoryCoefficients(
    const FourierBasis<Scalar>& basis, const Trajectory<Scalar>& traj,
    const typename Dynamics<Scalar>::ProjectFn& project) {
  const Index T = traj.horizon();
  MatrixX<Scalar> points(T, basis.dim());
  for (Index t = 0; t < T; ++t) {
    const VectorX<Scalar> w = project(traj.states.row(t).transpose());
    if (w.size() != basis.dim()) {
      throw std::invalid_argument("trajectoryCoefficients: projection dimension mismatch");
    }
    points.row(t) = clampToWorkspace<Scalar>(w, basis.workspace()).transpose();
  }
  return pointCoefficients(basis, points);
}

}  // namespace ergosafe

#endif  // ERGOSAFE_BASIS_HPP
