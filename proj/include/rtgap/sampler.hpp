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

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtgap/model.hpp"
#include "rtgap/priors.hpp"
#include "rtgap/statespace.hpp"

namespace rtgap {

struct SamplerConfig {
  int n_iter = 10000;
  int burn_in = 5000;
  // Proposal scales stay at 1 through this sweep.
  int adapt_start = 10;
  double target_accept = 0.44;
  std::uint64_t seed = 1;
  bool state_draws = true;
  // Keep every state_thin-th post-burn-in state draw.
  int state_thin = 1;
  // 0 adapts on the previous sweep's 0/1 outcome; W > 0 on the acceptance
  // rate over the last W sweeps.
  int accept_window = 0;
  // Random prior draws tried besides the prior medians when picking the
  // starting point.
  int presearch = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static SamplerConfig from_json(const nlohmann::json& j);
};

// Proposal standard deviation for sweep j (1-based).
double adapt_sigma(double sigma_prev, double alpha_prev, int j, int adapt_start = 10,
                   double target_accept = 0.44);

// Log posterior kernel over unbounded parameters; may return -inf.
using Kernel = std::function<double(const Vector&)>;

struct MhResult {
  Vector theta;
  bool accepted = false;
  double alpha = 0.0;   // acceptance probability
  double kernel = 0.0;  // kernel at the returned theta
};

// Gaussian random-walk move on component k. NaN from the kernel throws
// NumericalError.
MhResult mh_step(const Vector& theta, double kernel_theta, Index k, double sigma_k,
                 const Kernel& kernel, std::mt19937_64& rng);

// Called after burn-in with the current unbounded parameters.
using StateSampler = std::function<Matrix(const Vector&, std::mt19937_64&)>;

struct ChainResult {
  Matrix theta;               // retained sweeps x dim, unbounded
  Vector kernel;              // kernel at each retained sweep
  Matrix accepted;            // n_iter x dim, 0/1
  Vector sigma;               // final proposal scales
  std::vector<Matrix> states;
  std::vector<int> state_sweeps;
  std::vector<int> sweeps;    // 1-based sweep of each retained row
};

ChainResult run_chain(const SamplerConfig& config, const Vector& theta0, const Kernel& kernel,
                      const StateSampler& states = {});

// loglik(f^-1(theta)) + log_prior(f^-1(theta)) + log_jacobian(theta).
// Likelihood failures count as -inf.
double posterior_kernel(const TrendCycleModel& model, const Matrix& y, const Vector& theta);

struct PosteriorDraws {
  ParameterLayout layout;
  std::vector<std::string> state_names;
  Matrix params;  // retained sweeps x parameters, bounded
  Vector kernel;
  std::vector<int> sweeps;
  Matrix accepted;
  Vector sigma;
  std::vector<Matrix> states;  // time x state per kept draw
  std::vector<int> state_sweeps;

  Index n_retained() const { return params.rows(); }
  // Acceptance rate of parameter k over the last `last` sweeps.
  double acceptance_rate(Index k, int last) const;
  Vector posterior_mean() const;
  // Empirical quantile (linear interpolation) of parameter k.
  double quantile(Index k, double q) const;
};

// Starting point: prior medians, or the best of medians and `presearch`
// prior draws. Throws NumericalError if no candidate has a finite kernel.
Vector initial_parameters(const SamplerConfig& config, const TrendCycleModel& model,
                          const Matrix& y);

PosteriorDraws run_chain(const SamplerConfig& config, const TrendCycleModel& model,
                         const Matrix& y, const std::optional<Vector>& start = std::nullopt);

// CSV with header sweep,parameter,value (bounded scale).
void write_draws_csv(const std::string& path, const PosteriorDraws& draws);
struct DrawTable {
  std::vector<std::string> names;
  std::vector<int> sweeps;
  Matrix values;
};
DrawTable read_draws_csv(const std::string& path);

// Binary state archive, all fields little-endian:
//   "RTGSTATE" | u32 version (1) | u32 0 | u64 draws | u64 time | u64 state
//   | draws x i64 sweep | draws x time x state f64 (state fastest)
void write_state_archive(const std::string& path, const std::vector<Matrix>& states,
                         const std::vector<int>& sweeps);
struct StateArchive {
  std::vector<int> sweeps;
  std::vector<Matrix> states;
};
StateArchive read_state_archive(const std::string& path);

}  // namespace rtgap
