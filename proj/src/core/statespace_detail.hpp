// Copyright 2026 The rtgap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/SparseCore>

#include "rtgap/statespace.hpp"

namespace rtgap::detail {

// The diffuse phase ends once the Frobenius norm of the infinity part is
// below this; it is also the threshold for treating F_inf as positive.
inline constexpr double kDiffuseTol = 1e-8;
// Prediction-error variances at or below this carry no information.
inline constexpr double kMinVariance = 1e-12;

using SparseMatrix = Eigen::SparseMatrix<double>;

SparseMatrix sparse_transition(const Matrix& T);

// P <- T P T' for symmetric P.
void predict_cov(const SparseMatrix& T, Matrix& P);

inline bool is_diagonal(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

}  // namespace rtgap::detail
