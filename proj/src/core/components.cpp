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

#include <string>

#include "rtgap/errors.hpp"
#include "rtgap/model.hpp"

namespace rtgap {

const VariableComponents& ComponentSeries::of(Variable v) const {
  for (const auto& c : variables)
    if (c.variable == v) return c;
  throw ValidationError(std::string("no components for variable ") + to_string(v));
}

ComponentSeries extract_components(const TrendCycleModel& model, const Matrix& smoothed_mean,
                                   const Vector& params, const Vector& scales) {
  const auto& rows = model.observables();
  const Index n = static_cast<Index>(rows.size());
  if (smoothed_mean.cols() != model.n_state())
    throw Error("extract_components: smoothed states have " +
                std::to_string(smoothed_mean.cols()) + " columns, model has " +
                std::to_string(model.n_state()) + " states");
  if (scales.size() != n)
    throw Error("extract_components: expected " + std::to_string(n) + " scales");
  const SystemMatrices sys = model.build_system(params);
  const Index n_time = smoothed_mean.rows();
  const auto& blocks = model.state_blocks();

  ComponentSeries out;
  for (Index r = 0; r < n; ++r) {
    VariableComponents vc;
    vc.variable = rows[static_cast<std::size_t>(r)];
    vc.business_cycle = vc.epc = vc.idiosyncratic = vc.trend = vc.bias = Vector::Zero(n_time);
    for (Index s = 0; s < model.n_state(); ++s) {
      const double z = sys.Z(r, s);
      if (z == 0.0) continue;
      Vector part = z * scales(r) * smoothed_mean.col(s);
      switch (blocks[static_cast<std::size_t>(s)]) {
        case StateBlock::business_cycle: vc.business_cycle += part; break;
        case StateBlock::epc: vc.epc += part; break;
        case StateBlock::idiosyncratic: vc.idiosyncratic += part; break;
        case StateBlock::trend: vc.trend += part; break;
        case StateBlock::bias: vc.bias += part; break;
      }
    }
    vc.fitted = vc.business_cycle + vc.epc + vc.idiosyncratic + vc.trend + vc.bias;
    out.variables.push_back(std::move(vc));
  }

  const Index gdp = model.row_of(Variable::gdp);
  if (gdp >= 0) {
    const double s = scales(gdp);
    out.gdp_cycle = s * (smoothed_mean.col(model.state("gap")) +
                         smoothed_mean.col(model.state("idio_gdp")));
    out.gdp_trend = s * smoothed_mean.col(model.state("trend_gdp"));
    out.potential = s * (smoothed_mean.col(model.state("trend_gdp")) +
                         smoothed_mean.col(model.state("trend_gdp_l1")) +
                         smoothed_mean.col(model.state("trend_gdp_l2")));
  }
  return out;
}

Vector output_gap_pct(const ComponentSeries& components) {
  if (components.gdp_trend.size() == 0 ||
      components.gdp_cycle.size() != components.gdp_trend.size())
    throw ValidationError("output gap needs the GDP cycle and trend");
  Vector out(components.gdp_trend.size());
  for (Index t = 0; t < out.size(); ++t) {
    const double trend = components.gdp_trend(t);
    if (!(trend > 0.0))
      throw ValidationError("nonpositive GDP trend at month index " + std::to_string(t));
    out(t) = 100.0 * components.gdp_cycle(t) / trend;
  }
  return out;
}

}  // namespace rtgap
