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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtgap/priors.hpp"
#include "rtgap/statespace.hpp"

namespace rtgap {

enum class SpecKind { undisciplined, tracking };

// Observables in measurement-row order.
enum class Variable {
  cbo,       // CBO cycle of real GDP (tracking only), quarterly
  gdp,       // real GDP, quarterly
  spf_gdp,   // SPF expected real GDP level, quarterly
  unemp,     // unemployment rate
  emp,       // employment
  oil,       // WTI spot price
  cpi,       // CPI inflation, YoY
  spf_infl,  // SPF expected inflation, quarterly
  uom_infl,  // UoM expected inflation
};

inline constexpr Variable kAllVariables[] = {
    Variable::cbo,  Variable::gdp, Variable::spf_gdp,  Variable::unemp,   Variable::emp,
    Variable::oil,  Variable::cpi, Variable::spf_infl, Variable::uom_infl};

const char* to_string(Variable v);
const char* to_string(SpecKind k);
Variable variable_from_string(const std::string& s);
SpecKind spec_from_string(const std::string& s);
bool is_quarterly(Variable v);

struct ModelConfig {
  SpecKind kind = SpecKind::undisciplined;
  // Modelled observables other than the CBO cycle; the tracking kind adds
  // the CBO row on top. Defaults to all eight.
  std::vector<Variable> variables = {Variable::gdp,  Variable::spf_gdp, Variable::unemp,
                                     Variable::emp,  Variable::oil,     Variable::cpi,
                                     Variable::spf_infl, Variable::uom_infl};
  // Admissible business-cycle periods in months.
  double gap_period_min = 24.0;
  double gap_period_max = 120.0;
  std::map<std::string, PriorSpec> priors;  // overrides by parameter name
  bool measurement_jitter = false;          // H = 1e-8 I instead of 0

  static ModelConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Default prior for a parameter name under the given config. These are
// weakly informative placeholders for normalized data.
PriorSpec default_prior(const std::string& name, const ModelConfig& config);

// Which economic block a state belongs to.
enum class StateBlock { business_cycle, epc, idiosyncratic, trend, bias };

class TrendCycleModel {
 public:
  explicit TrendCycleModel(ModelConfig config);

  const ModelConfig& config() const { return config_; }
  SpecKind kind() const { return config_.kind; }
  const ParameterLayout& parameters() const { return layout_; }
  // Measurement rows.
  const std::vector<Variable>& observables() const { return rows_; }
  const std::vector<std::string>& state_names() const { return states_; }
  const std::vector<StateBlock>& state_blocks() const { return blocks_; }
  Index n_state() const { return static_cast<Index>(states_.size()); }

  // Row of a variable, or -1 if not modelled.
  Index row_of(Variable v) const;
  bool has(Variable v) const { return row_of(v) >= 0; }
  Index state(const std::string& name) const;
  Index parameter(const std::string& name) const {
    return parameter_index(layout_, name);
  }

  // Throws ValidationError naming the first parameter outside its bounds.
  SystemMatrices build_system(const Vector& bounded) const;

 private:
  ModelConfig config_;
  std::vector<Variable> rows_;
  std::vector<std::string> states_;
  std::vector<StateBlock> blocks_;
  ParameterLayout layout_;
};

ParameterLayout parameter_layout(const ModelConfig& config);

// Per-variable historical decomposition in natural units.
struct VariableComponents {
  Variable variable;
  Vector business_cycle;
  Vector epc;
  Vector idiosyncratic;
  Vector trend;
  Vector bias;
  Vector fitted;  // sum of the above
};

struct ComponentSeries {
  std::vector<VariableComponents> variables;
  // Monthly latent GDP pieces (natural units): common plus idiosyncratic
  // GDP cycle, and potential output.
  Vector gdp_cycle;
  Vector gdp_trend;
  // Quarterly-aggregated potential output, (1 + L + L^2) trend.
  Vector potential;

  const VariableComponents& of(Variable v) const;
};

// `scales` holds one divisor per measurement row.
ComponentSeries extract_components(const TrendCycleModel& model,
                                   const Matrix& smoothed_mean,
                                   const Vector& params, const Vector& scales);

// 100 * (cycle / trend); throws ValidationError at the first month with a
// nonpositive trend.
Vector output_gap_pct(const ComponentSeries& components);

}  // namespace rtgap
