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

#include "rtgap/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rtgap/errors.hpp"

namespace rtgap {
namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void SamplerConfig::validate() const {
  if (n_iter < 1) throw ValidationError("sampler: n_iter must be positive");
  if (burn_in < 0 || burn_in >= n_iter) throw ValidationError("sampler: need 0 <= burn_in < n_iter");
  if (adapt_start < 0) throw ValidationError("sampler: adapt_start must be nonnegative");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    throw ValidationError("sampler: target_accept must lie in (0, 1)");
  if (state_thin < 1) throw ValidationError("sampler: state_thin must be positive");
  if (accept_window < 0) throw ValidationError("sampler: accept_window must be nonnegative");
  if (presearch < 0) throw ValidationError("sampler: presearch must be nonnegative");
}

nlohmann::json SamplerConfig::to_json() const {
  return {{"n_iter", n_iter},           {"burn_in", burn_in},
          {"adapt_start", adapt_start}, {"target_accept", target_accept},
          {"seed", seed},               {"state_draws", state_draws},
          {"state_thin", state_thin},   {"accept_window", accept_window},
          {"presearch", presearch}};
}

SamplerConfig SamplerConfig::from_json(const nlohmann::json& j) {
  SamplerConfig c;
  try {
    c.n_iter = j.value("n_iter", c.n_iter);
    c.burn_in = j.value("burn_in", c.burn_in);
    c.adapt_start = j.value("adapt_start", c.adapt_start);
    c.target_accept = j.value("target_accept", c.target_accept);
    c.seed = j.value("seed", c.seed);
    c.state_draws = j.value("state_draws", c.state_draws);
    c.state_thin = j.value("state_thin", c.state_thin);
    c.accept_window = j.value("accept_window", c.accept_window);
    c.presearch = j.value("presearch", c.presearch);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("sampler config: ") + e.what());
  }
  c.validate();
  return c;
}

double adapt_sigma(double sigma_prev, double alpha_prev, int j, int adapt_start,
                   double target_accept) {
  if (j <= adapt_start) return 1.0;
  return std::exp(alpha_prev - target_accept) * sigma_prev;
}

MhResult mh_step(const Vector& theta, double kernel_theta, Index k, double sigma_k,
                 const Kernel& kernel, std::mt19937_64& rng) {
  if (std::isnan(kernel_theta)) throw NumericalError("posterior kernel is NaN at the current point");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector candidate = theta;
  candidate(k) += sigma_k * normal(rng);
  const double kc = kernel(candidate);
  if (std::isnan(kc))
    throw NumericalError("posterior kernel is NaN at a candidate for component " +
                         std::to_string(k));
  const double u = unif(rng);
  MhResult r;
  double log_ratio = kc - kernel_theta;
  if (kc == kNegInf) log_ratio = kNegInf;
  else if (kernel_theta == kNegInf) log_ratio = std::numeric_limits<double>::infinity();
  r.alpha = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
  r.accepted = std::log(u) < log_ratio;
  r.theta = r.accepted ? candidate : theta;
  r.kernel = r.accepted ? kc : kernel_theta;
  return r;
}

ChainResult run_chain(const SamplerConfig& config, const Vector& theta0, const Kernel& kernel,
                      const StateSampler& states) {
  config.validate();
  const Index dim = theta0.size();
  if (dim == 0) throw ValidationError("sampler: empty parameter vector");
  std::mt19937_64 rng(config.seed);

  Vector theta = theta0;
  double current = kernel(theta);
  if (!std::isfinite(current))
    throw NumericalError("posterior kernel is not finite at the starting point; "
                         "choose a different start or enable the presearch");

  const int retained = config.n_iter - config.burn_in;
  ChainResult out;
  out.theta.resize(retained, dim);
  out.kernel.resize(retained);
  out.accepted = Matrix::Zero(config.n_iter, dim);
  out.sigma = Vector::Ones(dim);

  std::vector<Index> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), Index{0});
  for (int j = 1; j <= config.n_iter; ++j) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Index k : order) {
      double alpha_prev = 0.0;
      if (j > 1) {
        if (config.accept_window == 0) {
          alpha_prev = out.accepted(j - 2, k);
        } else {
          const int from = std::max(0, j - 1 - config.accept_window);
          alpha_prev = out.accepted.col(k).segment(from, j - 1 - from).mean();
        }
      }
      out.sigma(k) = adapt_sigma(out.sigma(k), alpha_prev, j, config.adapt_start,
                                 config.target_accept);
      MhResult r = mh_step(theta, current, k, out.sigma(k), kernel, rng);
      if (r.accepted) {
        theta = std::move(r.theta);
        current = r.kernel;
        out.accepted(j - 1, k) = 1.0;
      }
    }
    if (j > config.burn_in) {
      const int row = j - config.burn_in - 1;
      out.theta.row(row) = theta.transpose();
      out.kernel(row) = current;
      out.sweeps.push_back(j);
      if (states && (j - config.burn_in) % config.state_thin == 0) {
        out.states.push_back(states(theta, rng));
        out.state_sweeps.push_back(j);
      }
    }
  }
  return out;
}

double posterior_kernel(const TrendCycleModel& model, const Matrix& y, const Vector& theta) {
  const auto& layout = model.parameters();
  const Vector bounded = to_bounded(layout, theta);
  const double lp = log_prior(layout, bounded);
  if (lp == kNegInf) return kNegInf;
  double ll;
  try {
    ll = loglikelihood(model.build_system(bounded), y);
  } catch (const NumericalError&) {
    return kNegInf;
  }
  if (std::isnan(ll)) return kNegInf;
  return ll + lp + log_jacobian(layout, theta);
}

double PosteriorDraws::acceptance_rate(Index k, int last) const {
  const Index n = accepted.rows();
  const Index w = std::min<Index>(last, n);
  if (w <= 0) return 0.0;
  return accepted.col(k).tail(w).mean();
}

Vector PosteriorDraws::posterior_mean() const { return params.colwise().mean().transpose(); }

double PosteriorDraws::quantile(Index k, double q) const {
  std::vector<double> v(params.col(k).data(), params.col(k).data() + params.rows());
  if (v.empty()) throw ValidationError("no retained draws");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Vector initial_parameters(const SamplerConfig& config, const TrendCycleModel& model,
                          const Matrix& y) {
  const auto& layout = model.parameters();
  Vector best = prior_medians(layout);
  double best_k = posterior_kernel(model, y, to_unbounded(layout, best));
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  for (int i = 0; i < config.presearch; ++i) {
    const Vector cand = prior_draw(layout, rng);
    const double k = posterior_kernel(model, y, to_unbounded(layout, cand));
    if (k > best_k || !std::isfinite(best_k)) {
      best = cand;
      best_k = k;
    }
  }
  if (!std::isfinite(best_k))
    throw NumericalError("the likelihood fails at every starting candidate; "
                         "supply a different start or increase presearch");
  return best;
}

PosteriorDraws run_chain(const SamplerConfig& config, const TrendCycleModel& model,
                         const Matrix& y, const std::optional<Vector>& start) {
  config.validate();
  const auto& layout = model.parameters();
  const Vector theta0 =
      to_unbounded(layout, start ? *start : initial_parameters(config, model, y));
  Kernel kernel = [&](const Vector& th) { return posterior_kernel(model, y, th); };
  StateSampler sampler;
  if (config.state_draws)
    sampler = [&](const Vector& th, std::mt19937_64& rng) {
      return simulate_states(model.build_system(to_bounded(layout, th)), y, rng);
    };
  ChainResult chain = run_chain(config, theta0, kernel, sampler);

  PosteriorDraws d;
  d.layout = layout;
  d.state_names = model.state_names();
  d.params.resize(chain.theta.rows(), chain.theta.cols());
  for (Index r = 0; r < chain.theta.rows(); ++r)
    d.params.row(r) = to_bounded(layout, chain.theta.row(r).transpose()).transpose();
  d.kernel = std::move(chain.kernel);
  d.sweeps = std::move(chain.sweeps);
  d.accepted = std::move(chain.accepted);
  d.sigma = std::move(chain.sigma);
  d.states = std::move(chain.states);
  d.state_sweeps = std::move(chain.state_sweeps);
  return d;
}

}  // namespace rtgap
