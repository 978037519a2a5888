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
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>

#include "csv_util.hpp"
#include "rtgap/errors.hpp"
#include "rtgap/pipeline.hpp"

namespace rtgap {
namespace {

bool starts(const std::string& s, const char* p) { return s.rfind(p, 0) == 0; }

double default_value(const std::string& n) {
  if (n == "rho_gap") return 0.95;
  if (n == "lambda_gap") return 2.0 * std::numbers::pi / 60.0;
  if (n == "sigma2_gap") return 0.2;
  if (n == "rho_epc") return 0.9;
  if (n == "lambda_epc") return 2.0 * std::numbers::pi / 30.0;
  if (n == "sigma2_epc") return 0.3;
  if (starts(n, "rho_")) return 0.5;
  if (starts(n, "lambda_")) return 1.0;
  if (starts(n, "sigma2_trend_") || starts(n, "sigma2_bias_")) return 0.005;
  if (starts(n, "sigma2_")) return 0.05;
  if (starts(n, "gamma_unemp_")) return n.back() == '0' ? -0.4 : -0.1;
  if (starts(n, "gamma_")) return n.back() == '0' ? 0.4 : 0.1;
  if (starts(n, "delta_")) return 0.5;
  if (n == "drift_gdp") return 0.2;
  if (n == "drift_emp") return 0.1;
  throw Error("no synthetic default for " + n);
}

}  // namespace

Vector synthetic_parameters(const TrendCycleModel& model,
                            const std::map<std::string, double>& overrides) {
  const auto& layout = model.parameters();
  Vector p(static_cast<Index>(layout.size()));
  for (std::size_t i = 0; i < layout.size(); ++i)
    p(static_cast<Index>(i)) = default_value(layout[i].name);
  for (const auto& [name, value] : overrides) p(model.parameter(name)) = value;
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (!layout[i].prior.in_support(p(static_cast<Index>(i))))
      throw ValidationError("synthetic parameter " + layout[i].name + " is outside its prior support");
  return p;
}

Vector synthetic_start(const TrendCycleModel& model) {
  Vector s = Vector::Zero(model.n_state());
  for (Index i = 0; i < model.n_state(); ++i) {
    const std::string& n = model.state_names()[static_cast<std::size_t>(i)];
    if (starts(n, "trend_gdp")) s(i) = 100.0;
    else if (starts(n, "trend_")) s(i) = 10.0;
  }
  return s;
}

SyntheticDataset simulate_dataset(const TrendCycleModel& model, const SyntheticConfig& config) {
  config.validate();
  SyntheticDataset d;
  d.start_month = config.start_month;
  d.parameters = synthetic_parameters(model, config.parameters);
  std::mt19937_64 rng(config.seed);
  const auto sim = simulate_system(model.build_system(d.parameters), synthetic_start(model),
                                   config.n_months, rng);
  d.states = sim.states;
  d.observations = sim.observations;
  const auto& rows = model.observables();
  for (Index r = 0; r < d.observations.cols(); ++r)
    if (is_quarterly(rows[static_cast<std::size_t>(r)]))
      for (Index t = 0; t < d.observations.rows(); ++t)
        if (!is_quarter_end(config.start_month + static_cast<int>(t)))
          d.observations(t, r) = std::numeric_limits<double>::quiet_NaN();

  for (Variable v : rows)
    d.data.series.push_back({to_string(v), v, is_quarterly(v) ? Frequency::quarterly : Frequency::monthly,
                             SeriesTransform::level, 1.0});

  std::normal_distribution<double> noise(0.0, 1.0);
  const int last_month = config.start_month + config.n_months - 1;
  for (int k = 0; k < config.n_vintages; ++k) {
    const int cover = last_month - (config.n_vintages - 1 - k) * config.vintage_step;
    const bool final_vintage = k == config.n_vintages - 1;
    Vintage v;
    v.vintage_date = Date::from_month(cover + 1, 15);
    for (Index r = 0; r < d.observations.cols(); ++r) {
      const Variable var = rows[static_cast<std::size_t>(r)];
      auto& obs = v.series[to_string(var)];
      for (Index t = 0; t <= cover - config.start_month; ++t) {
        const double x = d.observations(t, r);
        if (std::isnan(x)) continue;
        int month = config.start_month + static_cast<int>(t);
        if (is_quarterly(var)) month -= 2;
        const double rev = final_vintage ? 0.0 : config.revision_sd * noise(rng);
        obs.push_back({Date::from_month(month), x + rev});
      }
    }
    for (Variable var : rows)
      d.calendar.releases.push_back({v.vintage_date, to_string(var),
                                     "vintages/" + v.vintage_date.str() + ".csv"});
    d.vintages.push_back(std::move(v));
  }
  return d;
}

void write_dataset(const std::string& dir, const TrendCycleModel& model,
                   const SyntheticDataset& data) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "vintages", ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  for (const auto& v : data.vintages)
    write_vintage((fs::path(dir) / "vintages" / (v.vintage_date.str() + ".csv")).string(), v);
  write_calendar((fs::path(dir) / "calendar.csv").string(), data.calendar);
  {
    const auto p = (fs::path(dir) / "config.json").string();
    auto os = detail::open_out(p);
    nlohmann::json j;
    j["model"] = model.config().to_json();
    j["data"] = data.data.to_json();
    j["data"]["calendar"] = "calendar.csv";
    j["data"]["grid_start"] = month_label(data.start_month);
    os << j.dump(2) << '\n';
  }
  {
    const auto p = (fs::path(dir) / "truth_states.csv").string();
    auto os = detail::open_out(p);
    os << "month";
    for (const auto& n : model.state_names()) os << ',' << n;
    os << '\n';
    for (Index t = 0; t < data.states.rows(); ++t) {
      os << month_label(data.start_month + static_cast<int>(t));
      for (Index j = 0; j < data.states.cols(); ++j) os << ',' << detail::fmt(data.states(t, j));
      os << '\n';
    }
  }
  {
    const auto p = (fs::path(dir) / "truth_parameters.json").string();
    auto os = detail::open_out(p);
    nlohmann::ordered_json j;
    for (std::size_t i = 0; i < model.parameters().size(); ++i)
      j[model.parameters()[i].name] = data.parameters(static_cast<Index>(i));
    os << j.dump(2) << '\n';
    if (!os) throw IoError("write failed for " + p);
  }
}

}  // namespace rtgap
