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

#ifndef ERGOSAFE_TYPES_HPP
#define ERGOSAFE_TYPES_HPP

#include <Eigen/Dense>

#include <type_traits>

namespace ergosafe {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXi = Eigen::VectorXi;
using MatrixXi = Eigen::MatrixXi;

// Read-only Eigen::Ref parameter types for free function templates. The
// std::type_identity_t keeps them out of template argument deduction so the
// scalar is pinned by the other arguments.
template <typename Scalar>
using VectorRef = Eigen::Ref<const VectorX<std::type_identity_t<Scalar>>>;

template <typename Scalar>
using MatrixRef = Eigen::Ref<const MatrixX<std::type_identity_t<Scalar>>>;

}  // namespace ergosafe

#endif  // ERGOSAFE_TYPES_HPP
