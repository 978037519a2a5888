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

#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtgap/statespace.hpp"

namespace rtgap {

enum class PriorFamily { normal, inverse_gamma, uniform };

// Prior family, hyperparameters and support of one parameter.
//
//   normal:        mean, sd; unbounded
//   inverse_gamma: shape, scale; support (lower, +inf), density on x-lower
//   uniform:       support (lower, upper)
struct PriorSpec {
  PriorFamily family = PriorFamily::normal;
  double mean = 0.0;
  double sd = 1.0;
  double shape = 1.0;
  double scale = 1.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  static PriorSpec normal(double mean, double sd);
  static PriorSpec inverse_gamma(double shape, double scale, double lower = 0.0);
  static PriorSpec uniform(double lower, double upper);

  void validate() const;

  bool in_support(double bounded) const;
  double to_unbounded(double bounded) const;
  double to_bounded(double unbounded) const;
  // log dBounded/dUnbounded
  double log_jacobian(double unbounded) const;
  // -inf outside the support.
  double log_density(double bounded) const;
  double median() const;
  double draw(std::mt19937_64& rng) const;

  nlohmann::json to_json() const;
  static PriorSpec from_json(const nlohmann::json& j);
};

struct Parameter {
  std::string name;
  PriorSpec prior;
};

using ParameterLayout = std::vector<Parameter>;

// Componentwise transforms over a layout. to_unbounded throws
// ValidationError naming the first parameter on or outside its bounds.
Vector to_unbounded(const ParameterLayout& layout, const Vector& bounded);
Vector to_bounded(const ParameterLayout& layout, const Vector& unbounded);
double log_jacobian(const ParameterLayout& layout, const Vector& unbounded);
double log_prior(const ParameterLayout& layout, const Vector& bounded);

Vector prior_medians(const ParameterLayout& layout);
Vector prior_draw(const ParameterLayout& layout, std::mt19937_64& rng);

// Position of a named parameter; throws ValidationError if absent.
Index parameter_index(const ParameterLayout& layout, const std::string& name);

}  // namespace rtgap
