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

#include <cmath>

#include "rtgap/errors.hpp"
#include "rtgap/statespace.hpp"
#include "statespace_detail.hpp"

// Backward recursions for the univariate exact-diffuse smoother. With
// P = P* + k P_inf the smoothing quantities are expanded in 1/k:
//
//   r = r0 + r1/k,   N = N0 + N1/k + N2/k^2
//
// and, for a diffuse step (F_inf > 0), with K_inf = M_inf/F_inf,
// K1 = (M* - K_inf F*)/F_inf, L0 = I - K_inf z, L1 = -K1 z:
//
//   r0 <- L0' r0
//   r1 <- z' v/F_inf + L0' r1 + L1' r0
//   N0 <- L0' N0 L0
//   N1 <- z'z/F_inf + L0' N1 L0 + L1' N0 L0 + L0' N0 L1
//   N2 <- -z'z F*/F_inf^2 + L0' N2 L0 + L0' N1 L1 + L1' N1 L0 + L1' N0 L1
//
// Regular steps use L = I - (M*/F*) z on every order. Then
//
//   mean = a + P* r0 + P_inf r1
//   cov  = P* - P* N0 P* - P* N1 P_inf - P_inf N1 P* - P_inf N2 P_inf.

namespace rtgap {
namespace {

// L' N L with L = I - k z, symmetric N.
void sandwich(Matrix& N, const Vector& k, const Eigen::RowVectorXd& z) {
  const Vector nk = N * k;
  const double knk = k.dot(nk);
  N.noalias() -= z.transpose() * nk.transpose();
  N.noalias() -= nk * z;
  N.noalias() += knk * (z.transpose() * z);
}

// A' N B + B' N A with A = I - ka z, B = -kb z (symmetric N).
Matrix cross_term(const Matrix& N, const Vector& ka, const Vector& kb,
                  const Eigen::RowVectorXd& z) {
  const Vector nkb = N * kb;
  Matrix m = -nkb * z;                               // N B
  m.noalias() += (ka.dot(nkb)) * (z.transpose() * z);  // -(ka z)' N B
  return m + m.transpose();
}

template <bool kCov>
SmoothedStates run_smoother(const SystemMatrices& model, const Matrix& y,
                            const FilterOutput& f) {
  const Index n = model.n_state();
  const Index n_time = y.rows();
  const detail::SparseMatrix Ts = detail::sparse_transition(model.T);
  const detail::SparseMatrix Tt = Ts.transpose();

  SmoothedStates out;
  out.mean.resize(n_time, n);
  if constexpr (kCov) out.cov.resize(static_cast<size_t>(n_time));

  Vector r0 = Vector::Zero(n), r1 = Vector::Zero(n);
  Matrix N0, N1, N2;
  if constexpr (kCov) {
    N0 = Matrix::Zero(n, n);
    N1 = Matrix::Zero(n, n);
    N2 = Matrix::Zero(n, n);
  }
  bool have_diffuse = false;

  for (Index t = n_time - 1; t >= 0; --t) {
    const auto& steps = f.steps[t];
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      const FilterStep& s = *it;
      if (s.kind == StepKind::skipped) continue;
      const Eigen::RowVectorXd z = model.Z.row(s.series);
      if (s.kind == StepKind::diffuse) {
        have_diffuse = true;
        const Vector kinf = s.m_inf / s.f_inf;
        const Vector k1 = (s.m_star - kinf * s.f_star) / s.f_inf;
        // r1 first: it reads the old r0.
        const double kinf_r1 = kinf.dot(r1);
        const double k1_r0 = k1.dot(r0);
        r1 -= z.transpose() * (kinf_r1 + k1_r0 - s.v / s.f_inf);
        r0 -= z.transpose() * kinf.dot(r0);
        if constexpr (kCov) {
          const Matrix zz = z.transpose() * z;
          // N2 <- -zz F*/F^2 + L0'N2L0 + (L0'N1L1 + L1'N1L0) + L1'N0L1
          Matrix n2 = N2;
          sandwich(n2, kinf, z);
          n2 += cross_term(N1, kinf, k1, z);
          n2 += (k1.dot(N0 * k1)) * zz;
          n2 -= zz * (s.f_star / (s.f_inf * s.f_inf));
          // N1 <- zz/F + L0'N1L0 + (L1'N0L0 + L0'N0L1)
          Matrix n1 = N1;
          sandwich(n1, kinf, z);
          n1 += cross_term(N0, kinf, k1, z);
          n1 += zz / s.f_inf;
          sandwich(N0, kinf, z);
          N1 = std::move(n1);
          N2 = std::move(n2);
        }
      } else {
        const Vector k = s.m_star / s.f_star;
        r0 -= z.transpose() * (k.dot(r0) - s.v / s.f_star);
        if (have_diffuse) r1 -= z.transpose() * k.dot(r1);
        if constexpr (kCov) {
          sandwich(N0, k, z);
          N0.noalias() += (z.transpose() * z) / s.f_star;
          if (have_diffuse) {
            sandwich(N1, k, z);
            sandwich(N2, k, z);
          }
        }
      }
    }

    const Matrix& Ps = f.predicted_cov[t];
    const Matrix& Pi = f.predicted_cov_inf[t];
    const bool inf_part = t < f.diffuse_end;
    Vector m = f.predicted_mean[t] + Ps * r0;
    if (inf_part) m.noalias() += Pi * r1;
    out.mean.row(t) = m.transpose();
    if constexpr (kCov) {
      const Matrix psn0 = Ps * N0;
      Matrix V = Ps - psn0 * Ps;
      if (inf_part) {
        const Matrix psn1pi = Ps * N1 * Pi;
        V -= psn1pi + psn1pi.transpose();
        V.noalias() -= Pi * N2 * Pi;
      }
      V = 0.5 * (V + V.transpose());
      for (Index i = 0; i < n; ++i)
        if (V(i, i) < 0.0) V(i, i) = 0.0;
      out.cov[t] = std::move(V);
    }

    if (t > 0) {
      r0 = Tt * r0;
      if (have_diffuse) r1 = Tt * r1;
      if constexpr (kCov) {
        // T' N T = T' (T' N)'
        auto step_back = [&Tt](Matrix& N) {
          Matrix x = Tt * N;
          N = Tt * x.transpose();
        };
        step_back(N0);
        if (have_diffuse) {
          step_back(N1);
          step_back(N2);
        }
      }
    }
  }
  return out;
}

}  // namespace

SmoothedStates smooth(const SystemMatrices& model, const Matrix& y,
                      const FilterOutput& filtered) {
  if (static_cast<Index>(filtered.steps.size()) != y.rows())
    throw ValidationError("filter output does not match the observations");
  return run_smoother<true>(model, y, filtered);
}

SmoothedStates smooth(const SystemMatrices& model, const Matrix& y) {
  return run_smoother<true>(model, y, filter_diffuse(model, y));
}

Matrix smooth_mean(const SystemMatrices& model, const Matrix& y) {
  return run_smoother<false>(model, y, filter_diffuse(model, y)).mean;
}

}  // namespace rtgap
