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
#include <cmath>

#include "rtgap/errors.hpp"
#include "rtgap/statespace.hpp"
#include "statespace_detail.hpp"

namespace rtgap {
namespace {

// Factor F with F F' = P for symmetric positive semi-definite P.
Matrix psd_factor(const Matrix& P) {
  if (P.size() == 0) return P;
  Eigen::SelfAdjointEigenSolver<Matrix> es(P);
  Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

Vector standard_normals(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector z(n);
  for (Index i = 0; i < n; ++i) z(i) = normal(rng);
  return z;
}

// Runs the system forward from `start` with shocks drawn from rng.
SimulatedPath forward(const SystemMatrices& model, const Vector& start,
                      const Vector& intercept, Index n_time,
                      std::mt19937_64& rng) {
  const Index n = model.n_state();
  const Index p = model.n_obs();
  const Vector q_sd = model.Q.diagonal().cwiseSqrt();
  const Vector h_sd = model.H.diagonal().cwiseSqrt();
  const detail::SparseMatrix Ts = detail::sparse_transition(model.T);

  SimulatedPath path{Matrix(n_time, n), Matrix(n_time, p)};
  Vector a = start;
  for (Index t = 0; t < n_time; ++t) {
    path.states.row(t) = a.transpose();
    Vector obs = model.Z * a;
    if (p > 0) obs += h_sd.cwiseProduct(standard_normals(p, rng));
    path.observations.row(t) = obs.transpose();
    a = Ts * a + intercept;
    if (model.n_shock() > 0)
      a += model.R * q_sd.cwiseProduct(standard_normals(model.n_shock(), rng));
  }
  return path;
}

}  // namespace

SimulatedPath simulate_system(const SystemMatrices& model, const Vector& start,
                              Index n_time, std::mt19937_64& rng) {
  model.validate();
  if (start.size() != model.n_state())
    throw ValidationError("start vector length must equal n_state");
  return forward(model, start, model.c, n_time, rng);
}

// Simulation smoother with the mean adjustment for intercepts:
//
//   1. draw (a+, y+) from the system with c = 0 and a zero-mean start
//      (diffuse states at 0, stationary states from N(0, P*_1));
//   2. smooth y - y+ with the original system (intercepts included);
//   3. return a+ + E[a | y - y+].
//
// The smoothed mean is affine in the data, so E[a | y - y+] = E[a | y] -
// A y+, and a+ - A y+ has exactly the conditional covariance. The value
// given to the diffuse starting states cancels between a+ and the
// smoothed correction, so zero is as good as any.
Matrix simulate_states(const SystemMatrices& model, const Matrix& y,
                       std::mt19937_64& rng) {
  if (y.cols() != model.n_obs())
    throw ValidationError("observation column count must equal n_obs");
  const Index n = model.n_state();
  const InitialState init = initial_state(model);
  const Vector start = psd_factor(init.cov) * standard_normals(n, rng);
  const SimulatedPath plus = forward(model, start, Vector::Zero(n), y.rows(), rng);

  Matrix y_star = y - plus.observations;  // NaN stays NaN
  const Matrix correction = smooth_mean(model, y_star);
  return plus.states + correction;
}

Matrix simulate_states(const SystemMatrices& model, const Matrix& y,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return simulate_states(model, y, rng);
}

ForecastPath forecast(const SystemMatrices& model, const Vector& terminal_mean,
                      const Matrix& terminal_cov, Index horizon) {
  if (horizon < 1) throw ValidationError("forecast horizon must be >= 1");
  const Index n = model.n_state();
  if (terminal_mean.size() != n || terminal_cov.rows() != n ||
      terminal_cov.cols() != n)
    throw ValidationError("terminal moments do not match the state dimension");
  const Matrix rqr = model.R * model.Q * model.R.transpose();

  ForecastPath path;
  Vector a = terminal_mean;
  Matrix P = terminal_cov;
  for (Index h = 1; h <= horizon; ++h) {
    a = model.T * a + model.c;
    P = model.T * P * model.T.transpose() + rqr;
    P = 0.5 * (P + P.transpose());
    path.obs_mean.push_back(model.Z * a);
    path.obs_cov.push_back(model.Z * P * model.Z.transpose() + model.H);
    path.state_mean.push_back(a);
    path.state_cov.push_back(P);
  }
  return path;
}

}  // namespace rtgap
