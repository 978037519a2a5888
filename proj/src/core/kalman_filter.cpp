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

#include <Eigen/SparseCore>
#include <cmath>
#include <numbers>

#include "rtgap/errors.hpp"
#include "rtgap/statespace.hpp"
#include "statespace_detail.hpp"

namespace rtgap {
namespace detail {

SparseMatrix sparse_transition(const Matrix& T) {
  SparseMatrix s = T.sparseView();
  s.makeCompressed();
  return s;
}

void predict_cov(const SparseMatrix& T, Matrix& P) {
  // T P T' = T (T P)' for symmetric P.
  Matrix tp = T * P;
  P = T * tp.transpose();
}

}  // namespace detail

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

template <bool kStore>
FilterOutput run_filter(const SystemMatrices& model, const Matrix& y) {
  if (y.cols() != model.n_obs())
    throw ValidationError("observation column count (" +
                          std::to_string(y.cols()) + ") must equal n_obs (" +
                          std::to_string(model.n_obs()) + ")");
  if (!detail::is_diagonal(model.H))
    throw ValidationError(
        "measurement covariance H must be diagonal for the univariate filter");

  const Index n = model.n_state();
  const Index n_time = y.rows();
  const InitialState init = initial_state(model);
  const detail::SparseMatrix Ts = detail::sparse_transition(model.T);
  const Matrix rqr = model.R * model.Q * model.R.transpose();

  Vector a = init.mean;
  Matrix P = init.cov;
  Matrix Pinf = init.cov_inf;
  bool diffuse = Pinf.norm() > detail::kDiffuseTol;
  if (!diffuse) Pinf.setZero();

  FilterOutput out;
  out.diffuse_end = diffuse ? n_time : 0;
  if constexpr (kStore) {
    out.predicted_mean.reserve(n_time);
    out.predicted_cov.reserve(n_time);
    out.predicted_cov_inf.reserve(n_time);
    out.filtered_mean.reserve(n_time);
    out.filtered_cov.reserve(n_time);
    out.filtered_cov_inf.reserve(n_time);
    out.steps.resize(static_cast<size_t>(n_time));
  }

  Vector ms(n), mi(n);
  for (Index t = 0; t < n_time; ++t) {
    if constexpr (kStore) {
      out.predicted_mean.push_back(a);
      out.predicted_cov.push_back(P);
      out.predicted_cov_inf.push_back(Pinf);
    }
    for (Index i = 0; i < model.n_obs(); ++i) {
      const double obs = y(t, i);
      if (std::isnan(obs)) continue;
      const auto z = model.Z.row(i);
      const double v = obs - z.dot(a);
      ms.noalias() = P * z.transpose();
      const double fs = z.dot(ms) + model.H(i, i);
      double fi = 0.0;
      if (diffuse) {
        mi.noalias() = Pinf * z.transpose();
        fi = z.dot(mi);
      }

      FilterStep step;
      step.series = i;
      step.v = v;
      step.f_star = fs;
      step.f_inf = fi;
      double contribution = 0.0;
      if (diffuse && fi > detail::kDiffuseTol) {
        step.kind = StepKind::diffuse;
        a.noalias() += mi * (v / fi);
        P.noalias() += (fs / (fi * fi)) * mi * mi.transpose();
        P.noalias() -= (ms * mi.transpose() + mi * ms.transpose()) / fi;
        Pinf.noalias() -= (mi * mi.transpose()) / fi;
        contribution = -0.5 * (kLog2Pi + std::log(fi));
        ++out.diffuse_terms;
        ++out.likelihood_terms;
      } else if (fs > detail::kMinVariance) {
        step.kind = StepKind::regular;
        a.noalias() += ms * (v / fs);
        P.noalias() -= (ms * ms.transpose()) / fs;
        contribution = -0.5 * (kLog2Pi + std::log(fs) + v * v / fs);
        ++out.likelihood_terms;
      } else {
        step.kind = StepKind::skipped;
      }
      if (!std::isfinite(contribution))
        throw NumericalError("non-finite likelihood contribution", t);
      out.loglik += contribution;

      if (diffuse) {
        ++out.diffuse_steps;
        if (step.kind == StepKind::diffuse) {
          Pinf = 0.5 * (Pinf + Pinf.transpose());
          if (Pinf.norm() < detail::kDiffuseTol) {
            Pinf.setZero();
            diffuse = false;
          }
        }
      }
      P = 0.5 * (P + P.transpose());

      if constexpr (kStore) {
        if (step.kind != StepKind::skipped) {
          step.m_star = ms;
          if (step.kind == StepKind::diffuse) step.m_inf = mi;
        }
        out.steps[t].push_back(std::move(step));
      }
    }
    if constexpr (kStore) {
      out.filtered_mean.push_back(a);
      out.filtered_cov.push_back(P);
      out.filtered_cov_inf.push_back(Pinf);
    }
    if (!diffuse && out.diffuse_end == n_time) out.diffuse_end = t + 1;

    a = Ts * a + model.c;
    detail::predict_cov(Ts, P);
    P += rqr;
    P = 0.5 * (P + P.transpose());
    if (diffuse) {
      detail::predict_cov(Ts, Pinf);
      Pinf = 0.5 * (Pinf + Pinf.transpose());
    }
  }
  if (!std::isfinite(out.loglik))
    throw NumericalError("non-finite log-likelihood");
  return out;
}

}  // namespace

FilterOutput filter_diffuse(const SystemMatrices& model, const Matrix& y) {
  return run_filter<true>(model, y);
}

double loglikelihood(const SystemMatrices& model, const Matrix& y) {
  return run_filter<false>(model, y).loglik;
}

}  // namespace rtgap
