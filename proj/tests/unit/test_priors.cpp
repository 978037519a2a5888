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
#include <limits>
#include <random>

#include "doctest.h"
#include "rtgap/errors.hpp"
#include "rtgap/priors.hpp"

using namespace rtgap;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// ln(1.5) and -2 ln(2) to 21 digits.
constexpr double kLog1p5 = 0.405465108108164381978;
constexpr double kMinus2Log2 = -1.38629436111989061883;
constexpr double kMinusHalfLog2Pi = -0.918938533204672741780;

ParameterLayout single(PriorSpec p) { return {{"x", p}}; }

// Integral of f over (0, inf) by composite Simpson in s = log x.
template <class F>
double integrate_positive(F f) {
  const double lo = -30.0, hi = 30.0;
  const int n = 600000;
  const double h = (hi - lo) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = lo + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * f(std::exp(s)) * std::exp(s);
  }
  return sum * h / 3.0;
}
}  // namespace

TEST_CASE("bounded to unbounded transforms") {
  CHECK(PriorSpec::normal(0, 1).to_unbounded(0.3) == 0.3);
  CHECK(PriorSpec::uniform(0, 1).to_unbounded(0.5) == 0.0);
  CHECK(PriorSpec::inverse_gamma(2, 1, 1.0).to_unbounded(2.5) ==
        doctest::Approx(kLog1p5).epsilon(1e-15));
}

TEST_CASE("unbounded to bounded transforms") {
  CHECK(PriorSpec::uniform(0, 1).to_bounded(0.0) == 0.5);
  CHECK(PriorSpec::inverse_gamma(2, 1, 0.0).to_bounded(0.0) == 1.0);
  CHECK(PriorSpec::normal(1, 2).to_bounded(-7.25) == -7.25);
}

TEST_CASE("out-of-bounds values are rejected with the parameter name") {
  const ParameterLayout layout = {{"rho_gap", PriorSpec::uniform(0, 1)},
                                  {"sigma2_gap", PriorSpec::inverse_gamma(3, 1)}};
  Vector v(2);
  v << 1.0, 0.5;
  try {
    to_unbounded(layout, v);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("rho_gap") != std::string::npos);
  }
  v << 0.5, 0.0;
  CHECK_THROWS_WITH_AS(to_unbounded(layout, v), doctest::Contains("sigma2_gap"),
                       ValidationError);
}

TEST_CASE("to_bounded saturates strictly inside the support") {
  const PriorSpec u = PriorSpec::uniform(-2.0, 3.0);
  CHECK(u.to_bounded(1e6) < 3.0);
  CHECK(u.to_bounded(-1e6) > -2.0);
  CHECK(u.to_bounded(800.0) < 3.0);
  const PriorSpec ig = PriorSpec::inverse_gamma(2, 1, 0.5);
  CHECK(ig.to_bounded(-1e6) > 0.5);
  CHECK(std::isfinite(ig.to_bounded(1e6)));
}

TEST_CASE("round trip over random admissible values") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    PriorSpec p;
    double x;
    switch (i % 3) {
      case 0:
        p = PriorSpec::normal(0.0, 1.0);
        x = 20.0 * unif(rng) - 10.0;
        break;
      case 1: {
        const double a = 4.0 * unif(rng) - 2.0;
        p = PriorSpec::inverse_gamma(2.0, 1.0, a);
        x = a + 1e-3 + 10.0 * unif(rng);
        break;
      }
      default: {
        const double a = 4.0 * unif(rng) - 2.0;
        const double b = a + 0.1 + 5.0 * unif(rng);
        p = PriorSpec::uniform(a, b);
        x = a + (b - a) * (0.001 + 0.998 * unif(rng));
        break;
      }
    }
    worst = std::max(worst, std::abs(p.to_bounded(p.to_unbounded(x)) - x));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("log Jacobian values") {
  const ParameterLayout normals = {{"a", PriorSpec::normal(0, 1)},
                                   {"b", PriorSpec::normal(3, 2)}};
  CHECK(log_jacobian(normals, Vector::Constant(2, 0.7)) == 0.0);
  CHECK(log_jacobian(single(PriorSpec::uniform(0, 1)), Vector::Zero(1)) ==
        doctest::Approx(kMinus2Log2).epsilon(1e-12));
  CHECK(PriorSpec::inverse_gamma(3, 1).log_jacobian(0.4054651) == 0.4054651);
}

TEST_CASE("log Jacobian matches central differences") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(-4.0, 4.0);
  const PriorSpec specs[] = {PriorSpec::normal(0, 1),
                             PriorSpec::inverse_gamma(2, 1, -1.0),
                             PriorSpec::uniform(-0.5, 2.0)};
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const double u = unif(rng);
    for (const auto& p : specs) {
      const double deriv = (p.to_bounded(u + h) - p.to_bounded(u - h)) / (2 * h);
      CHECK(std::abs(std::log(deriv) - p.log_jacobian(u)) < 1e-5);
    }
  }
}

TEST_CASE("log prior values") {
  CHECK(PriorSpec::uniform(0, 1).log_density(0.7) == 0.0);
  CHECK(PriorSpec::normal(0, 1).log_density(0.0) ==
        doctest::Approx(kMinusHalfLog2Pi).epsilon(1e-14));
  CHECK(PriorSpec::uniform(0, 1).log_density(1.2) == -kInf);
  CHECK(PriorSpec::inverse_gamma(2, 1, 0.5).log_density(0.4) == -kInf);
  const ParameterLayout layout = {{"a", PriorSpec::uniform(0, 1)},
                                  {"b", PriorSpec::normal(0, 1)}};
  Vector v(2);
  v << 1.5, 0.0;
  CHECK(log_prior(layout, v) == -kInf);
}

TEST_CASE("inverse-gamma density at its mode matches quadrature normalization") {
  const double shape = 2.5, scale = 0.7, lower = 0.25;
  const PriorSpec p = PriorSpec::inverse_gamma(shape, scale, lower);
  auto kernel = [&](double d) { return std::pow(d, -shape - 1.0) * std::exp(-scale / d); };
  const double norm = integrate_positive(kernel);
  const double mode = scale / (shape + 1.0);
  CHECK(std::abs(std::exp(p.log_density(lower + mode)) - kernel(mode) / norm) < 1e-8);
}

TEST_CASE("bounded-space kernel shifts by the log width ratio between uniform supports") {
  // Same value, two supports containing it: log prior differs by
  // ln((b2 - a2) / (b1 - a1)); any likelihood term is common to both.
  const double x = 0.4, loglik = -12.75;
  const PriorSpec p1 = PriorSpec::uniform(0.0, 1.0);
  const PriorSpec p2 = PriorSpec::uniform(-1.0, 2.5);
  const double k1 = loglik + p1.log_density(x);
  const double k2 = loglik + p2.log_density(x);
  CHECK(std::abs((k1 - k2) - std::log(3.5 / 1.0)) < 1e-14);
  // The Jacobian term is the log derivative of each support's own map.
  for (const auto& p : {p1, p2}) {
    const double u = p.to_unbounded(x);
    CHECK(p.log_jacobian(u) ==
          doctest::Approx(std::log((x - p.lower) * (p.upper - x) / (p.upper - p.lower))));
  }
}

TEST_CASE("prior medians and draws stay in support") {
  const ParameterLayout layout = {{"a", PriorSpec::uniform(0.2, 0.9)},
                                  {"b", PriorSpec::inverse_gamma(3, 2, 0.1)},
                                  {"c", PriorSpec::normal(-1, 3)}};
  const Vector med = prior_medians(layout);
  CHECK(med(0) == doctest::Approx(0.55));
  CHECK(med(2) == -1.0);
  // Median of the shifted inverse gamma: half the mass below it.
  std::mt19937_64 rng(3);
  int below = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const Vector d = prior_draw(layout, rng);
    CHECK(std::isfinite(log_prior(layout, d)));
    below += d(1) < med(1);
  }
  CHECK(std::abs(below / double(n) - 0.5) < 0.01);
}

TEST_CASE("prior config round trips through json") {
  const PriorSpec p = PriorSpec::inverse_gamma(3, 0.5, 0.0);
  const PriorSpec q = PriorSpec::from_json(p.to_json());
  CHECK(q.family == PriorFamily::inverse_gamma);
  CHECK(q.shape == 3.0);
  CHECK(q.scale == 0.5);
  CHECK_THROWS_AS(PriorSpec::from_json({{"family", "uniform"}, {"lower", 1}, {"upper", 0}}),
                  ValidationError);
  CHECK_THROWS_AS(PriorSpec::from_json({{"family", "beta"}}), ValidationError);
}
