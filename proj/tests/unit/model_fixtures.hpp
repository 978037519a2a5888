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

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "rtgap/model.hpp"

namespace rtgap::testing {

// A fixed interior parameter point with every loading switched on.
inline Vector demo_parameters(const TrendCycleModel& model) {
  const auto& layout = model.parameters();
  Vector p(static_cast<Index>(layout.size()));
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const std::string& n = layout[i].name;
    double v = 0.0;
    if (n == "rho_gap") v = 0.93;
    else if (n == "lambda_gap") v = 2.0 * std::numbers::pi / 60.0;
    else if (n == "sigma2_gap") v = 0.3;
    else if (n.rfind("rho_", 0) == 0) v = 0.6;
    else if (n.rfind("lambda_", 0) == 0) v = 0.8;
    else if (n.rfind("sigma2_trend_", 0) == 0 || n.rfind("sigma2_bias_", 0) == 0) v = 0.01;
    else if (n.rfind("sigma2_", 0) == 0) v = 0.1;
    else if (n.rfind("gamma_", 0) == 0) v = (n.back() == '0' ? 0.6 : 0.2) * (n.find("unemp") != std::string::npos ? -1.0 : 1.0);
    else if (n.rfind("delta_", 0) == 0) v = 0.4;
    else if (n == "drift_gdp") v = 0.05;
    else if (n == "drift_emp") v = 0.02;
    p(static_cast<Index>(i)) = v;
  }
  return p;
}

inline Vector demo_start(const TrendCycleModel& model) {
  Vector s = Vector::Zero(model.n_state());
  for (Index i = 0; i < model.n_state(); ++i) {
    const std::string& n = model.state_names()[static_cast<std::size_t>(i)];
    if (n.rfind("trend_gdp", 0) == 0) s(i) = 100.0;
    else if (n.rfind("trend_", 0) == 0) s(i) = 10.0;
  }
  return s;
}

// Keeps quarterly rows only in quarter-end months (t % 3 == 2).
inline Matrix mask_quarterly(const TrendCycleModel& model, Matrix y) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Index r = 0; r < y.cols(); ++r)
    if (is_quarterly(model.observables()[static_cast<std::size_t>(r)]))
      for (Index t = 0; t < y.rows(); ++t)
        if (t % 3 != 2) y(t, r) = nan;
  return y;
}

}  // namespace rtgap::testing
