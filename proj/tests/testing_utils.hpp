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

#ifndef ERGOSAFE_TESTING_UTILS_HPP
#define ERGOSAFE_TESTING_UTILS_HPP

#include <functional>

#include "ergosafe/rng.hpp"
#include "ergosafe/types.hpp"

namespace ergosafe::testing {

/// Central finite-difference gradient of a scalar function of a vector.
inline VectorX<double> fdGradient(const std::function<double(const VectorX<double>&)>& f,
                                  VectorX<double> x, double step = 1e-6) {
  VectorX<double> g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double saved = x(i);
    x(i) = saved + step;
    const double fp = f(x);
    x(i) = saved - step;
    const double fm = f(x);
    x(i) = saved;
    g(i) = (fp - fm) / (2.0 * step);
  }
  return g;
}

/// Elementwise relative agreement with an absolute floor for near-zero
/// entries: |a - b| <= rel * max(|a|, |b|) + floor.
inline bool closeElementwise(const VectorX<double>& a, const VectorX<double>& b,
                             double rel, double floor) {
  if (a.size() != b.size()) return false;
  for (Index i = 0; i < a.size(); ++i) {
    const double err = std::abs(a(i) - b(i));
    if (err > rel * std::max(std::abs(a(i)), std::abs(b(i))) + floor) return false;
  }
  return true;
}

inline VectorX<double> randomVector(SplitMix64& rng, Index n, double lo, double hi) {
  VectorX<double> v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

inline MatrixX<double> randomMatrix(SplitMix64& rng, Index rows, Index cols,
                                    double lo, double hi) {
  MatrixX<double> m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(lo, hi);
  }
  return m;
}

}  // namespace ergosafe::testing

#endif  // ERGOSAFE_TESTING_UTILS_HPP
