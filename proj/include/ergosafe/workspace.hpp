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

#ifndef ERGOSAFE_WORKSPACE_HPP
#define ERGOSAFE_WORKSPACE_HPP

#include <stdexcept>
#include <utility>

#include "ergosafe/types.hpp"

namespace ergosafe {

/// Rectangular exploration domain [0, L_0] x ... x [0, L_{v-1}].
template <typename Scalar>
class Workspace {
 public:
  explicit Workspace(VectorX<Scalar> extents) : extents_(std::move(extents)) {
    if (extents_.size() < 1) {
      throw std::invalid_argument("Workspace: dimension must be >= 1");
    }
    if ((extents_.array() <= Scalar(0)).any()) {
      throw std::invalid_argument("Workspace: every extent must be positive");
    }
  }

  Index dim() const { return extents_.size(); }
  const VectorX<Scalar>& extents() const { return extents_; }
  Scalar extent(Index i) const { return extents_(i); }
  Scalar minExtent() const { return extents_.minCoeff(); }

  bool contains(const Eigen::Ref<const VectorX<Scalar>>& w) const {
    return (w.array() >= Scalar(0)).all() &&
           (w.array() <= extents_.array()).all();
  }

 private:
  VectorX<Scalar> extents_;
};

/// Clips each coordinate of w to [0, L_i]. Idempotent.
template <typename Scalar>
VectorX<Scalar> clampToWorkspace(const VectorRef<Scalar>& w,
                                 const Workspace<Scalar>& ws) {
  if (w.size() != ws.dim()) {
    throw std::invalid_argument("clampToWorkspace: dimension mismatch");
  }
  return w.cwiseMax(Scalar(0)).cwiseMin(ws.extents());
}

}  // namespace ergosafe

#endif  // ERGOSAFE_WORKSPACE_HPP
