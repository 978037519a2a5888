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

#include "rtgap/priors.hpp"

#include <boost/math/distributions/inverse_gamma.hpp>
#include <cmath>

#include "rtgap/errors.hpp"

namespace rtgap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

const char* family_name(PriorFamily f) {
  switch (f) {
    case PriorFamily::normal: return "normal";
    case PriorFamily::inverse_gamma: return "inverse_gamma";
    case PriorFamily::uniform: return "uniform";
  }
  return "?";
}

}  // namespace

PriorSpec PriorSpec::normal(double mean, double sd) {
  PriorSpec p;
  p.family = PriorFamily::normal;
  p.mean = mean;
  p.sd = sd;
  return p;
}

PriorSpec PriorSpec::inverse_gamma(double shape, double scale, double lower) {
  PriorSpec p;
  p.family = PriorFamily::inverse_gamma;
  p.shape = shape;
  p.scale = scale;
  p.lower = lower;
  p.upper = kInf;
  return p;
}

PriorSpec PriorSpec::uniform(double lower, double upper) {
  PriorSpec p;
  p.family = PriorFamily::uniform;
  p.lower = lower;
  p.upper = upper;
  return p;
}

void PriorSpec::validate() const {
  switch (family) {
    case PriorFamily::normal:
      if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd))
        throw ValidationError("normal prior needs finite mean and sd > 0");
      break;
    case PriorFamily::inverse_gamma:
      if (!std::isfinite(lower))
        throw ValidationError("inverse-gamma prior needs a finite lower bound");
      if (!(shape > 0.0) || !(scale > 0.0))
        throw ValidationError("inverse-gamma prior needs shape > 0 and scale > 0");
      break;
    case PriorFamily::uniform:
      if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper))
        throw ValidationError("uniform prior needs finite bounds with lower < upper");
      break;
  }
}

bool PriorSpec::in_support(double x) const {
  switch (family) {
    case PriorFamily::normal: return std::isfinite(x);
    case PriorFamily::inverse_gamma: return x > lower && x < kInf;
    case PriorFamily::uniform: return x > lower && x < upper;
  }
  return false;
}

double PriorSpec::to_unbounded(double x) const {
  if (!in_support(x))
    throw ValidationError("value " + std::to_string(x) + " outside the support");
  switch (family) {
    case PriorFamily::normal: return x;
    case PriorFamily::inverse_gamma: return std::log(x - lower);
    case PriorFamily::uniform: return std::log((x - lower) / (upper - x));
  }
  return x;
}

double PriorSpec::to_bounded(double u) const {
  switch (family) {
    case PriorFamily::normal:
      return u;
    case PriorFamily::inverse_gamma: {
      const double e = std::min(std::exp(u), std::numeric_limits<double>::max());
      const double x = e + lower;
      return x > lower ? x : std::nextafter(lower, kInf);
    }
    case PriorFamily::uniform: {
      // (a + b e^u) / (1 + e^u), evaluated from the nearer bound.
      const double width = upper - lower;
      double x;
      if (u >= 0.0)
        x = upper - width / (1.0 + std::exp(u));
      else {
        const double e = std::exp(u);
        x = lower + width * e / (1.0 + e);
      }
      if (!(x < upper)) x = std::nextafter(upper, lower);
      if (!(x > lower)) x = std::nextafter(lower, upper);
      return x;
    }
  }
  return u;
}

double PriorSpec::log_jacobian(double u) const {
  switch (family) {
    case PriorFamily::normal: return 0.0;
    case PriorFamily::inverse_gamma: return u;
    case PriorFamily::uniform:
      return std::log(upper - lower) + u - 2.0 * softplus(u);
  }
  return 0.0;
}

double PriorSpec::log_density(double x) const {
  if (!in_support(x)) return -kInf;
  switch (family) {
    case PriorFamily::normal: {
      const double z = (x - mean) / sd;
      return -kHalfLog2Pi - std::log(sd) - 0.5 * z * z;
    }
    case PriorFamily::inverse_gamma: {
      const double d = x - lower;
      return shape * std::log(scale) - std::lgamma(shape) -
             (shape + 1.0) * std::log(d) - scale / d;
    }
    case PriorFamily::uniform:
      return -std::log(upper - lower);
  }
  return -kInf;
}

double PriorSpec::median() const {
  switch (family) {
    case PriorFamily::normal: return mean;
    case PriorFamily::inverse_gamma:
      return lower + boost::math::median(
                         boost::math::inverse_gamma_distribution<>(shape, scale));
    case PriorFamily::uniform: return 0.5 * (lower + upper);
  }
  return mean;
}

double PriorSpec::draw(std::mt19937_64& rng) const {
  switch (family) {
    case PriorFamily::normal:
      return std::normal_distribution<double>(mean, sd)(rng);
    case PriorFamily::inverse_gamma: {
      const double g = std::gamma_distribution<double>(shape, 1.0 / scale)(rng);
      return lower + 1.0 / g;
    }
    case PriorFamily::uniform: {
      double x;
      do {
        x = std::uniform_real_distribution<double>(lower, upper)(rng);
      } while (!(x > lower));
      return x;
    }
  }
  return mean;
}

nlohmann::json PriorSpec::to_json() const {
  nlohmann::json j;
  j["family"] = family_name(family);
  switch (family) {
    case PriorFamily::normal:
      j["mean"] = mean;
      j["sd"] = sd;
      break;
    case PriorFamily::inverse_gamma:
      j["shape"] = shape;
      j["scale"] = scale;
      j["lower"] = lower;
      break;
    case PriorFamily::uniform:
      j["lower"] = lower;
      j["upper"] = upper;
      break;
  }
  return j;
}

PriorSpec PriorSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family"))
    throw ValidationError("prior entry must be an object with a 'family'");
  const std::string fam = j.at("family").get<std::string>();
  auto num = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
      throw ValidationError(fam + " prior is missing numeric '" + key + "'");
    return j.at(key).get<double>();
  };
  PriorSpec p;
  if (fam == "normal")
    p = normal(num("mean"), num("sd"));
  else if (fam == "inverse_gamma")
    p = inverse_gamma(num("shape"), num("scale"),
                      j.contains("lower") ? num("lower") : 0.0);
  else if (fam == "uniform")
    p = uniform(num("lower"), num("upper"));
  else
    throw ValidationError("unknown prior family '" + fam + "'");
  p.validate();
  return p;
}

Vector to_unbounded(const ParameterLayout& layout, const Vector& bounded) {
  if (bounded.size() != static_cast<Index>(layout.size()))
    throw ValidationError("parameter vector length does not match the layout");
  Vector u(bounded.size());
  for (Index i = 0; i < u.size(); ++i) {
    const Parameter& p = layout[i];
    if (!p.prior.in_support(bounded(i)))
      throw ValidationError("parameter '" + p.name + "' = " +
                            std::to_string(bounded(i)) +
                            " is on or outside its bounds");
    u(i) = p.prior.to_unbounded(bounded(i));
  }
  return u;
}

Vector to_bounded(const ParameterLayout& layout, const Vector& unbounded) {
  if (unbounded.size() != static_cast<Index>(layout.size()))
    throw ValidationError("parameter vector length does not match the layout");
  Vector b(unbounded.size());
  for (Index i = 0; i < b.size(); ++i) b(i) = layout[i].prior.to_bounded(unbounded(i));
  return b;
}

double log_jacobian(const ParameterLayout& layout, const Vector& unbounded) {
  double sum = 0.0;
  for (Index i = 0; i < unbounded.size(); ++i)
    sum += layout[i].prior.log_jacobian(unbounded(i));
  return sum;
}

double log_prior(const ParameterLayout& layout, const Vector& bounded) {
  double sum = 0.0;
  for (Index i = 0; i < bounded.size(); ++i) {
    const double lp = layout[i].prior.log_density(bounded(i));
    if (lp == -kInf) return -kInf;
    sum += lp;
  }
  return sum;
}

Vector prior_medians(const ParameterLayout& layout) {
  Vector m(static_cast<Index>(layout.size()));
  for (size_t i = 0; i < layout.size(); ++i) m(i) = layout[i].prior.median();
  return m;
}

Vector prior_draw(const ParameterLayout& layout, std::mt19937_64& rng) {
  Vector d(static_cast<Index>(layout.size()));
  for (size_t i = 0; i < layout.size(); ++i) d(i) = layout[i].prior.draw(rng);
  return d;
}

Index parameter_index(const ParameterLayout& layout, const std::string& name) {
  for (size_t i = 0; i < layout.size(); ++i)
    if (layout[i].name == name) return static_cast<Index>(i);
  throw ValidationError("unknown parameter '" + name + "'");
}

}  // namespace rtgap
