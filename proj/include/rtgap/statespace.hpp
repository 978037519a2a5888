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

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

namespace rtgap {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Linear Gaussian state-space system
//
//   y_t     = Z a_t + e_t,                e_t ~ N(0, H)
//   a_{t+1} = c + T a_t + R u_t,          u_t ~ N(0, Q)
//
// Q and H are diagonal. States flagged diffuse start with an infinite
// variance (unit infinity-part); the remaining states start at the
// unconditional moments of their stationary sub-block.
struct SystemMatrices {
  Matrix Z;
  Matrix T;
  Vector c;
  Matrix R;
  Matrix Q;
  Matrix H;
  std::vector<bool> diffuse;
  std::vector<std::string> state_names;  // position i names state i

  Index n_state() const { return T.rows(); }
  Index n_obs() const { return Z.rows(); }
  Index n_shock() const { return R.cols(); }

  // Index of a named state; throws ValidationError if absent.
  Index state_index(const std::string& name) const;

  // Checks dimensions, diagonal nonnegative Q/H, the name bijection, and
  // that the non-diffuse states form a stable block fed by no diffuse
  // state.
  void validate() const;

  // Debug dump: row-major matrices plus the state layout map.
  nlohmann::json to_json() const;
};

// Initial conditions implied by the diffuse flags.
struct InitialState {
  Vector mean;
  Matrix cov;      // finite part P*
  Matrix cov_inf;  // infinity part P_inf
};

InitialState initial_state(const SystemMatrices& model);

// Solves P = A P A' + W for stable A.
Matrix solve_discrete_lyapunov(const Matrix& A, const Matrix& W);

enum class StepKind : std::uint8_t {
  diffuse,  // F_inf > 0
  regular,  // F_inf == 0, F* > 0
  skipped,  // no information in this element
};

// One univariate observation step of the filter. The smoother replays
// these backwards.
struct FilterStep {
  Index series = 0;
  StepKind kind = StepKind::regular;
  double v = 0.0;
  double f_star = 0.0;
  double f_inf = 0.0;
  Vector m_star;  // P* z'
  Vector m_inf;   // P_inf z' (diffuse steps only)
};

struct FilterOutput {
  double loglik = 0.0;
  // Univariate steps processed while the infinity part was nonzero.
  Index diffuse_steps = 0;
  // Steps with F_inf > 0; each would carry a log(kappa) term under a
  // large-kappa initialization.
  Index diffuse_terms = 0;
  // First time index at which the infinity part is zero before the
  // observation update (n_time if the diffuse phase never ends).
  Index diffuse_end = 0;
  Index likelihood_terms = 0;

  // Filled only for full runs. predicted_* are the moments of a_t given
  // y_1..y_{t-1}; filtered_* given y_1..y_t.
  std::vector<Vector> predicted_mean;
  std::vector<Matrix> predicted_cov;
  std::vector<Matrix> predicted_cov_inf;
  std::vector<Vector> filtered_mean;
  std::vector<Matrix> filtered_cov;
  std::vector<Matrix> filtered_cov_inf;
  std::vector<std::vector<FilterStep>> steps;
};

struct SmoothedStates {
  Matrix mean;              // n_time x n_state
  std::vector<Matrix> cov;  // per time
};

struct ForecastPath {
  std::vector<Vector> state_mean;  // entry h-1 is horizon h
  std::vector<Matrix> state_cov;
  std::vector<Vector> obs_mean;
  std::vector<Matrix> obs_cov;
};

// Observations are n_time x n_obs; NaN marks a missing entry.
FilterOutput filter_diffuse(const SystemMatrices& model, const Matrix& y);

// Likelihood only; skips all per-time storage.
double loglikelihood(const SystemMatrices& model, const Matrix& y);

SmoothedStates smooth(const SystemMatrices& model, const Matrix& y);
SmoothedStates smooth(const SystemMatrices& model, const Matrix& y,
                      const FilterOutput& filtered);

// Smoothed means only (no covariance recursion).
Matrix smooth_mean(const SystemMatrices& model, const Matrix& y);

// One draw of the state path from p(a_1..a_n | y). Rows are time.
Matrix simulate_states(const SystemMatrices& model, const Matrix& y,
                       std::uint64_t seed);
Matrix simulate_states(const SystemMatrices& model, const Matrix& y,
                       std::mt19937_64& rng);

// Unconditional draw of states and observations from the system (states
// start at `start`, no missing values). Used by the synthetic data
// generator.
struct SimulatedPath {
  Matrix states;        // n_time x n_state
  Matrix observations;  // n_time x n_obs
};
SimulatedPath simulate_system(const SystemMatrices& model, const Vector& start,
                              Index n_time, std::mt19937_64& rng);

ForecastPath forecast(const SystemMatrices& model, const Vector& terminal_mean,
                      const Matrix& terminal_cov, Index horizon);

}  // namespace rtgap
