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

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rtgap/errors.hpp"
#include "rtgap/statespace.hpp"
#include "statespace_detail.hpp"

namespace rtgap {
namespace {

void check_diagonal_nonnegative(const Matrix& m, const char* name) {
  if (m.rows() != m.cols())
    throw ValidationError(std::string(name) + " must be square");
  if (!detail::is_diagonal(m))
    throw ValidationError(std::string(name) + " must be diagonal");
  for (Index i = 0; i < m.rows(); ++i) {
    if (!std::isfinite(m(i, i)) || m(i, i) < 0.0)
      throw ValidationError(std::string(name) + " diagonal entry " +
                            std::to_string(i) +
                            " must be finite and nonnegative");
  }
}

// Connected components of the stationary states, linking states that
// interact through T or the innovation covariance.
std::vector<std::vector<Index>> stationary_blocks(const SystemMatrices& model,
                                                  const Matrix& rqr) {
  const Index n = model.n_state();
  std::vector<Index> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Index i = 0; i < n; ++i) {
    if (model.diffuse[i]) continue;
    for (Index j = 0; j < n; ++j) {
      if (model.diffuse[j] || i == j) continue;
      if (model.T(i, j) != 0.0 || rqr(i, j) != 0.0) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<Index>> blocks;
  std::vector<Index> slot(static_cast<size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    if (model.diffuse[i]) continue;
    Index root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[root]].push_back(i);
  }
  return blocks;
}

Matrix sub_matrix(const Matrix& m, const std::vector<Index>& rows,
                  const std::vector<Index>& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

double spectral_radius(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1) return std::abs(a(0, 0));
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Index SystemMatrices::state_index(const std::string& name) const {
  auto it = std::find(state_names.begin(), state_names.end(), name);
  if (it == state_names.end())
    throw ValidationError("unknown state '" + name + "'");
  return static_cast<Index>(it - state_names.begin());
}

void SystemMatrices::validate() const {
  const Index n = n_state();
  if (T.cols() != n) throw ValidationError("T must be square");
  if (Z.cols() != n) throw ValidationError("Z column count must equal n_state");
  if (c.size() != n) throw ValidationError("c length must equal n_state");
  if (R.rows() != n) throw ValidationError("R row count must equal n_state");
  if (Q.rows() != R.cols())
    throw ValidationError("Q dimension must equal R column count");
  if (H.rows() != n_obs())
    throw ValidationError("H dimension must equal n_obs");
  if (static_cast<Index>(diffuse.size()) != n)
    throw ValidationError("diffuse flags must have n_state entries");
  if (static_cast<Index>(state_names.size()) != n)
    throw ValidationError("state layout must name every state");
  std::set<std::string> names(state_names.begin(), state_names.end());
  if (static_cast<Index>(names.size()) != n)
    throw ValidationError("state names must be unique");
  check_diagonal_nonnegative(Q, "Q");
  check_diagonal_nonnegative(H, "H");
  if (!Z.allFinite() || !T.allFinite() || !c.allFinite() || !R.allFinite())
    throw ValidationError("system matrices must be finite");

  for (Index i = 0; i < n; ++i) {
    if (diffuse[i]) continue;
    for (Index j = 0; j < n; ++j)
      if (diffuse[j] && T(i, j) != 0.0)
        throw ValidationError("stationary state '" + state_names[i] +
                              "' is driven by diffuse state '" +
                              state_names[j] + "'");
  }
  const Matrix rqr = R * Q * R.transpose();
  for (const auto& block : stationary_blocks(*this, rqr)) {
    if (spectral_radius(sub_matrix(T, block, block)) >= 1.0)
      throw ValidationError("stationary block containing '" +
                            state_names[block.front()] +
                            "' has spectral radius >= 1");
  }
}

nlohmann::json SystemMatrices::to_json() const {
  auto dump = [](const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  nlohmann::json j;
  j["Z"] = dump(Z);
  j["T"] = dump(T);
  j["c"] = std::vector<double>(c.data(), c.data() + c.size());
  j["R"] = dump(R);
  j["Q"] = dump(Q);
  j["H"] = dump(H);
  j["diffuse"] = diffuse;
  nlohmann::json layout = nlohmann::json::object();
  for (size_t i = 0; i < state_names.size(); ++i) layout[state_names[i]] = i;
  j["layout"] = layout;
  return j;
}

Matrix solve_discrete_lyapunov(const Matrix& A, const Matrix& W) {
  const Index m = A.rows();
  if (m == 0) return Matrix(0, 0);
  if (m <= 12) {
    // vec(P) = (I - A (x) A)^{-1} vec(W)
    const Index m2 = m * m;
    Matrix K = Matrix::Identity(m2, m2);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) {
        const double aij = A(i, j);
        if (aij == 0.0) continue;
        K.block(i * m, j * m, m, m) -= aij * A;
      }
    Eigen::Map<const Vector> w(W.data(), m2);
    Vector p = K.partialPivLu().solve(w);
    Matrix P = Eigen::Map<Matrix>(p.data(), m, m);
    return 0.5 * (P + P.transpose());
  }
  // Doubling: P = sum_k A^k W A'^k.
  Matrix P = W;
  Matrix Ak = A;
  for (int iter = 0; iter < 100; ++iter) {
    Matrix next = P + Ak * P * Ak.transpose();
    const double change = (next - P).cwiseAbs().maxCoeff();
    P = std::move(next);
    Ak = Ak * Ak;
    if (change <= 1e-15 * std::max(1.0, P.cwiseAbs().maxCoeff())) break;
  }
  return 0.5 * (P + P.transpose());
}

InitialState initial_state(const SystemMatrices& model) {
  const Index n = model.n_state();
  InitialState init{Vector::Zero(n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (Index i = 0; i < n; ++i)
    if (model.diffuse[i]) init.cov_inf(i, i) = 1.0;

  const Matrix rqr = model.R * model.Q * model.R.transpose();
  for (const auto& block : stationary_blocks(model, rqr)) {
    const Matrix A = sub_matrix(model.T, block, block);
    const Matrix W = sub_matrix(rqr, block, block);
    const Matrix P = solve_discrete_lyapunov(A, W);
    Vector cb(static_cast<Index>(block.size()));
    for (size_t i = 0; i < block.size(); ++i) cb(i) = model.c(block[i]);
    Vector mean = Vector::Zero(cb.size());
    if (cb.cwiseAbs().maxCoeff() > 0.0)
      mean = (Matrix::Identity(A.rows(), A.cols()) - A).partialPivLu().solve(cb);
    for (size_t i = 0; i < block.size(); ++i) {
      init.mean(block[i]) = mean(i);
      for (size_t j = 0; j < block.size(); ++j)
        init.cov(block[i], block[j]) = P(i, j);
    }
  }
  return init;
}

}  // namespace rtgap
