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

#include "rtgap/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rtgap/errors.hpp"

namespace rtgap {
namespace {

constexpr Variable kGammaVariables[] = {Variable::spf_gdp, Variable::unemp, Variable::emp,
                                        Variable::cpi,     Variable::spf_infl,
                                        Variable::uom_infl};
constexpr Variable kDeltaVariables[] = {Variable::cpi, Variable::spf_infl, Variable::uom_infl};

bool contains(const std::vector<Variable>& vs, Variable v) {
  return std::find(vs.begin(), vs.end(), v) != vs.end();
}

bool uses_epc(const std::vector<Variable>& vs) {
  return contains(vs, Variable::oil) || contains(vs, Variable::cpi) ||
         contains(vs, Variable::spf_infl) || contains(vs, Variable::uom_infl);
}

bool uses_infl_trend(const std::vector<Variable>& vs) {
  return contains(vs, Variable::cpi) || contains(vs, Variable::spf_infl) ||
         contains(vs, Variable::uom_infl);
}

bool uses_gdp_trend(const std::vector<Variable>& vs) {
  return contains(vs, Variable::gdp) || contains(vs, Variable::spf_gdp);
}

std::vector<Variable> canonical(const std::vector<Variable>& vs) {
  std::vector<Variable> out;
  for (Variable v : kAllVariables)
    if (v != Variable::cbo && contains(vs, v)) out.push_back(v);
  return out;
}

void check_config(const ModelConfig& c) {
  if (c.variables.empty()) throw ValidationError("model: no variables selected");
  for (Variable v : c.variables)
    if (v == Variable::cbo)
      throw ValidationError("model: the CBO cycle row is added by the tracking kind, not listed");
  if (canonical(c.variables).size() != c.variables.size())
    throw ValidationError("model: duplicate variable");
  if (c.kind == SpecKind::tracking && !contains(c.variables, Variable::gdp))
    throw ValidationError("model: the tracking kind requires gdp");
  if (!(c.gap_period_min >= 2.0) || !(c.gap_period_max > c.gap_period_min) ||
      !std::isfinite(c.gap_period_max))
    throw ValidationError("model: need 2 <= gap_period_min < gap_period_max");
}

}  // namespace

const char* to_string(Variable v) {
  switch (v) {
    case Variable::cbo: return "cbo";
    case Variable::gdp: return "gdp";
    case Variable::spf_gdp: return "spf_gdp";
    case Variable::unemp: return "unemp";
    case Variable::emp: return "emp";
    case Variable::oil: return "oil";
    case Variable::cpi: return "cpi";
    case Variable::spf_infl: return "spf_infl";
    case Variable::uom_infl: return "uom_infl";
  }
  return "?";
}

const char* to_string(SpecKind k) {
  return k == SpecKind::tracking ? "tracking" : "undisciplined";
}

Variable variable_from_string(const std::string& s) {
  for (Variable v : kAllVariables)
    if (s == to_string(v)) return v;
  throw ValidationError("unknown variable '" + s + "'");
}

SpecKind spec_from_string(const std::string& s) {
  if (s == "tracking") return SpecKind::tracking;
  if (s == "undisciplined") return SpecKind::undisciplined;
  throw ValidationError("unknown model kind '" + s + "'");
}

bool is_quarterly(Variable v) {
  return v == Variable::cbo || v == Variable::gdp || v == Variable::spf_gdp ||
         v == Variable::spf_infl;
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    if (j.contains("kind")) c.kind = spec_from_string(j.at("kind").get<std::string>());
    if (j.contains("variables")) {
      c.variables.clear();
      for (const auto& v : j.at("variables"))
        c.variables.push_back(variable_from_string(v.get<std::string>()));
    }
    c.gap_period_min = j.value("gap_period_min", c.gap_period_min);
    c.gap_period_max = j.value("gap_period_max", c.gap_period_max);
    c.measurement_jitter = j.value("measurement_jitter", c.measurement_jitter);
    if (j.contains("priors"))
      for (const auto& [name, p] : j.at("priors").items())
        c.priors[name] = PriorSpec::from_json(p);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model config: ") + e.what());
  }
  check_config(c);
  c.variables = canonical(c.variables);
  return c;
}

nlohmann::json ModelConfig::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  j["variables"] = nlohmann::json::array();
  for (Variable v : variables) j["variables"].push_back(to_string(v));
  j["gap_period_min"] = gap_period_min;
  j["gap_period_max"] = gap_period_max;
  j["measurement_jitter"] = measurement_jitter;
  j["priors"] = nlohmann::json::object();
  for (const auto& [name, p] : priors) j["priors"][name] = p.to_json();
  return j;
}

PriorSpec default_prior(const std::string& name, const ModelConfig& config) {
  auto starts = [&](const char* p) { return name.rfind(p, 0) == 0; };
  if (starts("rho_")) return PriorSpec::uniform(0.0, 1.0);
  if (name == "lambda_gap")
    return PriorSpec::uniform(2.0 * std::numbers::pi / config.gap_period_max,
                              2.0 * std::numbers::pi / config.gap_period_min);
  if (starts("lambda_")) return PriorSpec::uniform(0.0, std::numbers::pi);
  if (starts("sigma2_trend_") || starts("sigma2_bias_")) return PriorSpec::inverse_gamma(3.0, 0.05);
  if (starts("sigma2_")) return PriorSpec::inverse_gamma(3.0, 1.0);
  if (starts("gamma_") || starts("delta_")) return PriorSpec::normal(0.0, 1.0);
  if (starts("drift_")) return PriorSpec::normal(0.0, 1.0);
  throw ValidationError("no default prior for parameter '" + name + "'");
}

ParameterLayout parameter_layout(const ModelConfig& config) {
  check_config(config);
  const auto vs = canonical(config.variables);
  std::vector<std::string> names;
  auto cycle = [&](const std::string& tag) {
    names.push_back("rho_" + tag);
    names.push_back("lambda_" + tag);
    names.push_back("sigma2_" + tag);
  };
  cycle("gap");
  if (uses_epc(vs)) cycle("epc");
  for (Variable v : kGammaVariables)
    if (contains(vs, v))
      for (int j = 0; j < 4; ++j)
        names.push_back("gamma_" + std::string(to_string(v)) + "_" + std::to_string(j));
  for (Variable v : kDeltaVariables)
    if (contains(vs, v)) names.push_back("delta_" + std::string(to_string(v)));
  for (Variable v : vs) cycle(to_string(v));
  if (uses_gdp_trend(vs)) names.push_back("sigma2_trend_gdp");
  if (contains(vs, Variable::unemp)) names.push_back("sigma2_trend_unemp");
  if (contains(vs, Variable::emp)) names.push_back("sigma2_trend_emp");
  if (contains(vs, Variable::oil)) names.push_back("sigma2_trend_oil");
  if (uses_infl_trend(vs)) names.push_back("sigma2_trend_infl");
  if (contains(vs, Variable::uom_infl)) names.push_back("sigma2_bias_uom");
  if (uses_gdp_trend(vs)) names.push_back("drift_gdp");
  if (contains(vs, Variable::emp)) names.push_back("drift_emp");

  for (const auto& [name, p] : config.priors)
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw ValidationError("prior override for unknown parameter '" + name + "'");

  ParameterLayout layout;
  for (const auto& n : names) {
    auto it = config.priors.find(n);
    PriorSpec p = it != config.priors.end() ? it->second : default_prior(n, config);
    p.validate();
    layout.push_back({n, p});
  }
  return layout;
}

TrendCycleModel::TrendCycleModel(ModelConfig config) : config_(std::move(config)) {
  check_config(config_);
  config_.variables = canonical(config_.variables);
  layout_ = parameter_layout(config_);
  const auto& vs = config_.variables;

  if (config_.kind == SpecKind::tracking) rows_.push_back(Variable::cbo);
  for (Variable v : vs) rows_.push_back(v);

  auto add = [&](const std::string& n, StateBlock b) {
    states_.push_back(n);
    blocks_.push_back(b);
  };
  for (const char* n : {"gap", "gap_star", "gap_l1", "gap_l2", "gap_l3"})
    add(n, StateBlock::business_cycle);
  if (uses_epc(vs)) {
    add("epc", StateBlock::epc);
    add("epc_star", StateBlock::epc);
  }
  for (Variable v : vs) {
    const std::string tag = std::string("idio_") + to_string(v);
    add(tag, StateBlock::idiosyncratic);
    add(tag + "_star", StateBlock::idiosyncratic);
    if (v == Variable::gdp) {
      add(tag + "_l1", StateBlock::idiosyncratic);
      add(tag + "_l2", StateBlock::idiosyncratic);
    }
  }
  if (uses_gdp_trend(vs))
    for (const char* n : {"trend_gdp", "trend_gdp_l1", "trend_gdp_l2"}) add(n, StateBlock::trend);
  if (contains(vs, Variable::unemp)) add("trend_unemp", StateBlock::trend);
  if (contains(vs, Variable::emp)) add("trend_emp", StateBlock::trend);
  if (contains(vs, Variable::oil)) add("trend_oil", StateBlock::trend);
  if (uses_infl_trend(vs)) add("trend_infl", StateBlock::trend);
  if (contains(vs, Variable::uom_infl)) add("bias_uom", StateBlock::bias);
  if (contains(vs, Variable::spf_gdp)) add("bias_spf_gdp", StateBlock::bias);
}

Index TrendCycleModel::row_of(Variable v) const {
  auto it = std::find(rows_.begin(), rows_.end(), v);
  return it == rows_.end() ? -1 : static_cast<Index>(it - rows_.begin());
}

Index TrendCycleModel::state(const std::string& name) const {
  auto it = std::find(states_.begin(), states_.end(), name);
  if (it == states_.end()) throw Error("model has no state '" + name + "'");
  return static_cast<Index>(it - states_.begin());
}

SystemMatrices TrendCycleModel::build_system(const Vector& bounded) const {
  const Index np = static_cast<Index>(layout_.size());
  if (bounded.size() != np)
    throw ValidationError("parameter vector has " + std::to_string(bounded.size()) +
                          " entries, layout has " + std::to_string(np));
  for (Index i = 0; i < np; ++i) {
    const auto& p = layout_[static_cast<std::size_t>(i)];
    const double x = bounded(i);
    bool ok = std::isfinite(x) && x >= p.prior.lower && x <= p.prior.upper;
    if (p.name.rfind("rho_", 0) == 0) ok = ok && x >= 0.0 && x < 1.0;
    if (p.name.rfind("sigma2_", 0) == 0) ok = ok && x >= 0.0;
    if (!ok)
      throw ValidationError("parameter '" + p.name + "' = " + std::to_string(x) +
                            " is outside its domain");
  }
  auto par = [&](const std::string& n) { return bounded(parameter(n)); };
  auto st = [&](const std::string& n) { return state(n); };
  const auto& vs = config_.variables;

  const Index m = n_state();
  const Index n = static_cast<Index>(rows_.size());
  SystemMatrices sys;
  sys.state_names = states_;
  sys.Z = Matrix::Zero(n, m);
  sys.T = Matrix::Zero(m, m);
  sys.c = Vector::Zero(m);
  sys.H = config_.measurement_jitter ? Matrix(Matrix::Identity(n, n) * 1e-8) : Matrix::Zero(n, n);
  sys.diffuse.assign(static_cast<std::size_t>(m), false);

  std::vector<std::pair<Index, double>> shocks;  // (state, variance)
  auto cycle = [&](const std::string& tag, const std::string& state_tag) {
    const double rho = par("rho_" + tag), lam = par("lambda_" + tag);
    const double s2 = par("sigma2_" + tag);
    const Index a = st(state_tag), b = st(state_tag + "_star");
    sys.T(a, a) = rho * std::cos(lam);
    sys.T(a, b) = rho * std::sin(lam);
    sys.T(b, a) = -rho * std::sin(lam);
    sys.T(b, b) = rho * std::cos(lam);
    shocks.push_back({a, s2});
    shocks.push_back({b, s2});
  };
  auto lag_chain = [&](const std::string& base, int lags) {
    Index prev = st(base);
    for (int l = 1; l <= lags; ++l) {
      const Index cur = st(base + "_l" + std::to_string(l));
      sys.T(cur, prev) = 1.0;
      prev = cur;
    }
  };
  auto trend = [&](const std::string& name, const std::string& variance) {
    const Index i = st(name);
    sys.T(i, i) = 1.0;
    sys.diffuse[static_cast<std::size_t>(i)] = true;
    if (!variance.empty()) shocks.push_back({i, par(variance)});
  };

  cycle("gap", "gap");
  lag_chain("gap", 3);
  if (uses_epc(vs)) cycle("epc", "epc");
  for (Variable v : vs) cycle(to_string(v), std::string("idio_") + to_string(v));
  if (contains(vs, Variable::gdp)) lag_chain("idio_gdp", 2);
  if (uses_gdp_trend(vs)) {
    trend("trend_gdp", "sigma2_trend_gdp");
    lag_chain("trend_gdp", 2);
    sys.diffuse[static_cast<std::size_t>(st("trend_gdp_l1"))] = true;
    sys.diffuse[static_cast<std::size_t>(st("trend_gdp_l2"))] = true;
    sys.c(st("trend_gdp")) = par("drift_gdp");
  }
  if (contains(vs, Variable::unemp)) trend("trend_unemp", "sigma2_trend_unemp");
  if (contains(vs, Variable::emp)) {
    trend("trend_emp", "sigma2_trend_emp");
    sys.c(st("trend_emp")) = par("drift_emp");
  }
  if (contains(vs, Variable::oil)) trend("trend_oil", "sigma2_trend_oil");
  if (uses_infl_trend(vs)) trend("trend_infl", "sigma2_trend_infl");
  if (contains(vs, Variable::uom_infl)) trend("bias_uom", "sigma2_bias_uom");
  if (contains(vs, Variable::spf_gdp)) trend("bias_spf_gdp", "");

  const Index k = static_cast<Index>(shocks.size());
  sys.R = Matrix::Zero(m, k);
  sys.Q = Matrix::Zero(k, k);
  for (Index j = 0; j < k; ++j) {
    sys.R(shocks[static_cast<std::size_t>(j)].first, j) = 1.0;
    sys.Q(j, j) = shocks[static_cast<std::size_t>(j)].second;
  }

  const char* gap_lags[] = {"gap", "gap_l1", "gap_l2", "gap_l3"};
  auto gamma_row = [&](Index r, Variable v) {
    for (int j = 0; j < 4; ++j)
      sys.Z(r, st(gap_lags[j])) = par("gamma_" + std::string(to_string(v)) + "_" + std::to_string(j));
  };
  auto aggregate = [&](Index r, const std::string& base) {
    sys.Z(r, st(base)) += 1.0;
    sys.Z(r, st(base + "_l1")) += 1.0;
    sys.Z(r, st(base + "_l2")) += 1.0;
  };

  for (Index r = 0; r < n; ++r) {
    const Variable v = rows_[static_cast<std::size_t>(r)];
    switch (v) {
      case Variable::cbo:
        aggregate(r, "gap");
        aggregate(r, "idio_gdp");
        break;
      case Variable::gdp:
        aggregate(r, "gap");
        aggregate(r, "idio_gdp");
        aggregate(r, "trend_gdp");
        break;
      case Variable::spf_gdp:
        gamma_row(r, v);
        sys.Z(r, st("idio_spf_gdp")) = 1.0;
        sys.Z(r, st("trend_gdp")) = 3.0;
        sys.Z(r, st("bias_spf_gdp")) = 1.0;
        break;
      case Variable::unemp:
      case Variable::emp:
        gamma_row(r, v);
        sys.Z(r, st(std::string("idio_") + to_string(v))) = 1.0;
        sys.Z(r, st(std::string("trend_") + to_string(v))) = 1.0;
        break;
      case Variable::oil:
        sys.Z(r, st("epc")) = 1.0;
        sys.Z(r, st("idio_oil")) = 1.0;
        sys.Z(r, st("trend_oil")) = 1.0;
        break;
      case Variable::cpi:
      case Variable::spf_infl:
      case Variable::uom_infl:
        gamma_row(r, v);
        sys.Z(r, st("epc")) = par("delta_" + std::string(to_string(v)));
        sys.Z(r, st(std::string("idio_") + to_string(v))) = 1.0;
        sys.Z(r, st("trend_infl")) = 1.0;
        if (v == Variable::uom_infl) sys.Z(r, st("bias_uom")) = 1.0;
        break;
    }
  }
  sys.validate();
  return sys;
}

}  // namespace rtgap
