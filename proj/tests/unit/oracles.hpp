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

// Reference implementations used only by tests. None of this shares code
// with the library filters.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <vector>

#include "rtgap/statespace.hpp"

namespace rtgap::testing {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

struct MultivariateFilterResult {
  double loglik = 0.0;
  std::vector<Vector> filtered_mean;
  std::vector<Matrix> filtered_cov;
};

// Initial moments built directly from the model: diffuse states get
// variance kappa, the rest come from a truncated power series of the
// stationary block.
inline void reference_initial(const SystemMatrices& m, double kappa,
                              Vector& a, Matrix& P) {
  const Index n = m.n_state();
  std::vector<Index> st;
  for (Index i = 0; i < n; ++i)
    if (!m.diffuse[i]) st.push_back(i);
  const Index k = static_cast<Index>(st.size());
  Matrix A(k, k), W(k, k);
  Vector cs(k);
  const Matrix rqr = m.R * m.Q * m.R.transpose();
  for (Index i = 0; i < k; ++i) {
    cs(i) = m.c(st[i]);
    for (Index j = 0; j < k; ++j) {
      A(i, j) = m.T(st[i], st[j]);
      W(i, j) = rqr(st[i], st[j]);
    }
  }
  Matrix S = Matrix::Zero(k, k), term = W;
  for (int it = 0; k > 0 && it < 20000; ++it) {
    S += term;
    term = A * term * A.transpose();
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  Vector mu = Vector::Zero(k);
  if (k > 0) mu = (Matrix::Identity(k, k) - A).fullPivLu().solve(cs);
  a = Vector::Zero(n);
  P = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    if (m.diffuse[i]) P(i, i) = kappa;
  for (Index i = 0; i < k; ++i) {
    a(st[i]) = mu(i);
    for (Index j = 0; j < k; ++j) P(st[i], st[j]) = S(i, j);
  }
}

// Textbook multivariate Kalman filter, observed subset per time.
inline MultivariateFilterResult multivariate_filter(const SystemMatrices& m,
                                                    const Matrix& y,
                                                    double kappa = 0.0) {
  MultivariateFilterResult out;
  Vector a;
  Matrix P;
  reference_initial(m, kappa, a, P);
  const Matrix rqr = m.R * m.Q * m.R.transpose();
  for (Index t = 0; t < y.rows(); ++t) {
    std::vector<Index> obs;
    for (Index i = 0; i < y.cols(); ++i)
      if (!std::isnan(y(t, i))) obs.push_back(i);
    if (!obs.empty()) {
      const Index p = static_cast<Index>(obs.size());
      Matrix Zw(p, m.n_state());
      Matrix Hw = Matrix::Zero(p, p);
      Vector yw(p);
      for (Index i = 0; i < p; ++i) {
        Zw.row(i) = m.Z.row(obs[i]);
        yw(i) = y(t, obs[i]);
        for (Index j = 0; j < p; ++j) Hw(i, j) = m.H(obs[i], obs[j]);
      }
      const Vector v = yw - Zw * a;
      const Matrix F = Zw * P * Zw.transpose() + Hw;
      Eigen::LDLT<Matrix> ldlt(F);
      const Matrix K = P * Zw.transpose() * ldlt.solve(Matrix::Identity(p, p));
      double logdet = ldlt.vectorD().array().log().sum();
      out.loglik += -0.5 * (p * kLog2Pi + logdet + v.dot(ldlt.solve(v)));
      a += K * v;
      P -= K * F * K.transpose();
      P = 0.5 * (P + P.transpose());
    }
    out.filtered_mean.push_back(a);
    out.filtered_cov.push_back(P);
    a = m.T * a + m.c;
    P = m.T * P * m.T.transpose() + rqr;
  }
  return out;
}

struct JointConditional {
  std::vector<Vector> mean;
  std::vector<Matrix> cov;
};

// Smoothing by brute force: stack every state and observation into one
// Gaussian vector and condition on the observed entries.
inline JointConditional joint_conditional(const SystemMatrices& m,
                                          const Matrix& y, double kappa) {
  const Index n = m.n_state();
  const Index T = y.rows();
  Vector a1;
  Matrix P1;
  reference_initial(m, kappa, a1, P1);
  const Matrix rqr = m.R * m.Q * m.R.transpose();

  // States: mean mu_t; covariance Cov(a_s, a_t).
  std::vector<Vector> mu(static_cast<size_t>(T));
  mu[0] = a1;
  for (Index t = 1; t < T; ++t) mu[t] = m.T * mu[t - 1] + m.c;
  Matrix S = Matrix::Zero(n * T, n * T);
  std::vector<Matrix> var(static_cast<size_t>(T));
  var[0] = P1;
  for (Index t = 1; t < T; ++t)
    var[t] = m.T * var[t - 1] * m.T.transpose() + rqr;
  for (Index s = 0; s < T; ++s) {
    Matrix block = var[s];  // Cov(a_t, a_s) for t >= s
    for (Index t = s; t < T; ++t) {
      S.block(t * n, s * n, n, n) = block;
      S.block(s * n, t * n, n, n) = block.transpose();
      block = m.T * block;
    }
  }
  std::vector<std::pair<Index, Index>> obs;
  for (Index t = 0; t < T; ++t)
    for (Index i = 0; i < y.cols(); ++i)
      if (!std::isnan(y(t, i))) obs.emplace_back(t, i);
  const Index k = static_cast<Index>(obs.size());
  Matrix G = Matrix::Zero(k, n * T);  // observation selector
  Vector yv(k), ymu(k);
  Matrix Hk = Matrix::Zero(k, k);
  for (Index r = 0; r < k; ++r) {
    auto [t, i] = obs[r];
    G.block(r, t * n, 1, n) = m.Z.row(i);
    yv(r) = y(t, i);
    ymu(r) = m.Z.row(i).dot(mu[t]);
    Hk(r, r) = m.H(i, i);
  }
  const Matrix Syy = G * S * G.transpose() + Hk;
  const Matrix Say = S * G.transpose();
  Eigen::FullPivLU<Matrix> lu(Syy);
  const Vector gain = lu.solve(yv - ymu);
  const Matrix post = S - Say * lu.solve(Say.transpose());
  JointConditional out;
  for (Index t = 0; t < T; ++t) {
    out.mean.push_back(mu[t] + Say.block(t * n, 0, n, k) * gain);
    out.cov.push_back(post.block(t * n, t * n, n, n));
  }
  return out;
}

// Random stable model: no diffuse states unless n_diffuse > 0, in which
// case the leading states are random walks that may be fed by the
// stationary states. (A unit-root block with off-diagonal terms can leave
// nearly unidentified diffuse directions that a kappa = 1e8 reference
// cannot resolve.)
inline SystemMatrices random_model(std::mt19937_64& rng, Index n_state,
                                   Index n_obs, Index n_diffuse = 0) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  SystemMatrices m;
  const Index ns = n_state - n_diffuse;
  m.T = Matrix::Zero(n_state, n_state);
  for (Index i = 0; i < n_diffuse; ++i) {
    m.T(i, i) = 1.0;
    for (Index j = n_diffuse; j < n_state; ++j) m.T(i, j) = 0.3 * normal(rng);
  }
  if (ns > 0) {
    Matrix A(ns, ns);
    for (Index i = 0; i < ns; ++i)
      for (Index j = 0; j < ns; ++j) A(i, j) = normal(rng);
    Eigen::EigenSolver<Matrix> es(A, false);
    const double rad = es.eigenvalues().cwiseAbs().maxCoeff();
    A *= (0.3 + 0.6 * unif(rng)) / rad;
    m.T.block(n_diffuse, n_diffuse, ns, ns) = A;
  }
  m.Z = Matrix(n_obs, n_state);
  for (Index i = 0; i < n_obs; ++i)
    for (Index j = 0; j < n_state; ++j) m.Z(i, j) = normal(rng);
  m.c = Vector(n_state);
  for (Index i = 0; i < n_state; ++i) m.c(i) = 0.2 * normal(rng);
  m.R = Matrix::Identity(n_state, n_state);
  m.Q = Matrix::Zero(n_state, n_state);
  for (Index i = 0; i < n_state; ++i) m.Q(i, i) = unif(rng);
  m.H = Matrix::Zero(n_obs, n_obs);
  for (Index i = 0; i < n_obs; ++i) m.H(i, i) = unif(rng);
  m.diffuse.assign(static_cast<size_t>(n_state), false);
  for (Index i = 0; i < n_diffuse; ++i) m.diffuse[i] = true;
  for (Index i = 0; i < n_state; ++i)
    m.state_names.push_back("s" + std::to_string(i));
  return m;
}

// Local level: one random-walk state observed with noise.
inline SystemMatrices local_level(double obs_var, double level_var) {
  SystemMatrices m;
  m.Z = Matrix::Ones(1, 1);
  m.T = Matrix::Ones(1, 1);
  m.c = Vector::Zero(1);
  m.R = Matrix::Ones(1, 1);
  m.Q = Matrix::Constant(1, 1, level_var);
  m.H = Matrix::Constant(1, 1, obs_var);
  m.diffuse = {true};
  m.state_names = {"level"};
  return m;
}

inline Matrix simulate_observations(const SystemMatrices& m, Index n_time,
                                    std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector a = Vector::Zero(m.n_state());
  Matrix y(n_time, m.n_obs());
  for (Index t = 0; t < n_time; ++t) {
    for (Index i = 0; i < m.n_obs(); ++i)
      y(t, i) = m.Z.row(i).dot(a) + std::sqrt(m.H(i, i)) * normal(rng);
    Vector u(m.n_shock());
    for (Index j = 0; j < m.n_shock(); ++j) u(j) = std::sqrt(m.Q(j, j)) * normal(rng);
    a = m.T * a + m.c + m.R * u;
  }
  return y;
}

}  // namespace rtgap::testing
