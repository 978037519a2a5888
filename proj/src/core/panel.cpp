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
#include <map>

#include "rtgap/data.hpp"
#include "rtgap/errors.hpp"

namespace rtgap {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int quarter_of(const Date& d) { return d.month_index() / 3; }

const char* to_string(Frequency f) { return f == Frequency::quarterly ? "quarterly" : "monthly"; }

const char* to_string(SeriesTransform t) {
  switch (t) {
    case SeriesTransform::level: return "level";
    case SeriesTransform::yoy_from_index: return "yoy_from_index";
    case SeriesTransform::spf_growth: return "spf_growth";
    case SeriesTransform::gap_from_potential: return "gap_from_potential";
  }
  return "?";
}

std::vector<Observation> scaled(std::vector<Observation> obs, double unit) {
  for (auto& o : obs) o.value *= unit;
  return obs;
}

// Sample sd of differences between observed pairs `step` rows apart.
double column_difference_sd(const Matrix& x, Index col, Index step) {
  double sum = 0.0, sum2 = 0.0;
  Index n = 0;
  for (Index t = step; t < x.rows(); ++t) {
    const double a = x(t - step, col), b = x(t, col);
    if (std::isnan(a) || std::isnan(b)) continue;
    const double d = b - a;
    sum += d;
    sum2 += d * d;
    ++n;
  }
  if (n < 2) return kNaN;
  const double mean = sum / static_cast<double>(n);
  return std::sqrt(std::max(0.0, (sum2 - static_cast<double>(n) * mean * mean) /
                                     static_cast<double>(n - 1)));
}

}  // namespace

const SeriesSpec* DataConfig::find(Variable role) const {
  for (const auto& s : series)
    if (s.role == role) return &s;
  return nullptr;
}

DataConfig DataConfig::from_json(const nlohmann::json& j) {
  DataConfig c;
  try {
    for (const auto& e : j.at("series")) {
      SeriesSpec s;
      s.id = e.at("id").get<std::string>();
      s.role = variable_from_string(e.at("role").get<std::string>());
      const std::string f = e.value("frequency", is_quarterly(s.role) ? "quarterly" : "monthly");
      if (f == "monthly") s.frequency = Frequency::monthly;
      else if (f == "quarterly") s.frequency = Frequency::quarterly;
      else throw ValidationError("series " + s.id + ": unknown frequency '" + f + "'");
      const std::string t = e.value("transform", "level");
      if (t == "level") s.transform = SeriesTransform::level;
      else if (t == "yoy_from_index") s.transform = SeriesTransform::yoy_from_index;
      else if (t == "spf_growth") s.transform = SeriesTransform::spf_growth;
      else if (t == "gap_from_potential") s.transform = SeriesTransform::gap_from_potential;
      else throw ValidationError("series " + s.id + ": unknown transform '" + t + "'");
      s.unit = e.value("unit", 1.0);
      if (!(std::isfinite(s.unit) && s.unit != 0.0))
        throw ValidationError("series " + s.id + ": unit must be finite and nonzero");
      for (const auto& prev : c.series)
        if (prev.role == s.role)
          throw ValidationError(std::string("two series share the role ") + to_string(s.role));
      c.series.push_back(s);
    }
    const std::string comp = j.value("spf_compounding", "simple");
    if (comp == "simple") c.spf_compounding = SpfCompounding::simple;
    else if (comp == "compound4") c.spf_compounding = SpfCompounding::compound4;
    else throw ValidationError("unknown spf_compounding '" + comp + "'");
    const std::string mode = j.value("scale_mode", "shared");
    if (mode == "shared") c.scale_mode = ScaleMode::shared;
    else if (mode == "per_series") c.scale_mode = ScaleMode::per_series;
    else if (mode == "none") c.scale_mode = ScaleMode::none;
    else throw ValidationError("unknown scale_mode '" + mode + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("data config: ") + e.what());
  }
  return c;
}

nlohmann::json DataConfig::to_json() const {
  nlohmann::json j;
  j["series"] = nlohmann::json::array();
  for (const auto& s : series)
    j["series"].push_back({{"id", s.id},
                           {"role", rtgap::to_string(s.role)},
                           {"frequency", to_string(s.frequency)},
                           {"transform", to_string(s.transform)},
                           {"unit", s.unit}});
  j["spf_compounding"] = spf_compounding == SpfCompounding::simple ? "simple" : "compound4";
  j["scale_mode"] = scale_mode == ScaleMode::shared       ? "shared"
                    : scale_mode == ScaleMode::per_series ? "per_series"
                                                          : "none";
  return j;
}

double spf_gdp_level(double expected_growth, double latest_gdp_level, SpfCompounding mode) {
  if (!(latest_gdp_level > 0.0))
    throw ValidationError("SPF level adjustment needs a positive GDP level");
  if (mode == SpfCompounding::compound4) return latest_gdp_level * std::pow(1.0 + expected_growth, 4);
  return latest_gdp_level * (1.0 + expected_growth);
}

std::vector<Observation> cpi_yoy(const std::vector<Observation>& index) {
  if (index.size() < 13) throw ValidationError("CPI YoY needs at least 13 monthly observations");
  std::map<int, double> by_month;
  for (const auto& o : index) {
    if (!(o.value > 0.0))
      throw ValidationError("nonpositive CPI index value at " + o.reference.str());
    by_month[o.reference.month_index()] = o.value;
  }
  std::vector<Observation> out;
  for (const auto& o : index) {
    auto it = by_month.find(o.reference.month_index() - 12);
    if (it == by_month.end()) continue;
    out.push_back({o.reference, 100.0 * (o.value / it->second - 1.0)});
  }
  return out;
}

std::vector<Observation> spf_gdp_levels(const std::vector<Observation>& growth,
                                        const std::vector<Observation>& gdp,
                                        SpfCompounding mode) {
  std::vector<Observation> out;
  for (const auto& g : growth) {
    const Observation* latest = nullptr;
    for (const auto& y : gdp)
      if (quarter_of(y.reference) < quarter_of(g.reference)) latest = &y;
    if (latest == nullptr) continue;
    out.push_back({g.reference, spf_gdp_level(g.value, latest->value, mode)});
  }
  return out;
}

std::vector<Observation> cycle_from_potential(const std::vector<Observation>& potential,
                                              const std::vector<Observation>& gdp) {
  std::map<int, double> by_quarter;
  for (const auto& y : gdp) by_quarter[quarter_of(y.reference)] = y.value;
  std::vector<Observation> out;
  for (const auto& p : potential) {
    auto it = by_quarter.find(quarter_of(p.reference));
    if (it != by_quarter.end()) out.push_back({p.reference, it->second - p.value});
  }
  return out;
}

double first_difference_sd(const std::vector<Observation>& obs, Frequency f) {
  if (obs.empty()) return kNaN;
  const int step = f == Frequency::quarterly ? 3 : 1;
  const int first = obs.front().reference.month_index();
  const int last = obs.back().reference.month_index();
  Matrix x = Matrix::Constant(last - first + 1, 1, kNaN);
  for (const auto& o : obs) {
    const int m = o.reference.month_index();
    x(f == Frequency::quarterly ? quarter_end(m) - quarter_end(first) : m - first, 0) = o.value;
  }
  return column_difference_sd(x, 0, step);
}

Matrix Panel::natural() const {
  Matrix out = values;
  for (Index r = 0; r < out.cols(); ++r) out.col(r) *= scales(r);
  return out;
}

Index Panel::count_observed() const {
  Index n = 0;
  for (Index t = 0; t < values.rows(); ++t)
    for (Index r = 0; r < values.cols(); ++r) n += std::isnan(values(t, r)) ? 0 : 1;
  return n;
}

Panel build_panel(const Vintage& vintage, const DataConfig& data, const TrendCycleModel& model,
                  int start_month, int end_month) {
  if (end_month < start_month) throw ValidationError("panel grid ends before it starts");
  const auto& rows = model.observables();
  const Index n_time = end_month - start_month + 1;
  const Index n = static_cast<Index>(rows.size());

  Panel p;
  p.start_month = start_month;
  p.rows = rows;
  p.values = Matrix::Constant(n_time, n, kNaN);
  std::vector<Frequency> freq;

  auto series_of = [&](Variable role) -> const SeriesSpec& {
    const SeriesSpec* s = data.find(role);
    if (s == nullptr)
      throw ValidationError(std::string("no series configured for ") + to_string(role));
    return *s;
  };

  for (Index r = 0; r < n; ++r) {
    const SeriesSpec& spec = series_of(rows[static_cast<std::size_t>(r)]);
    p.series_ids.push_back(spec.id);
    freq.push_back(spec.frequency);
    std::vector<Observation> obs = scaled(vintage.at(spec.id), spec.unit);
    switch (spec.transform) {
      case SeriesTransform::level: break;
      case SeriesTransform::yoy_from_index: obs = cpi_yoy(obs); break;
      case SeriesTransform::spf_growth:
      case SeriesTransform::gap_from_potential: {
        const SeriesSpec& g = series_of(Variable::gdp);
        const auto gdp = scaled(vintage.at(g.id), g.unit);
        obs = spec.transform == SeriesTransform::spf_growth
                  ? spf_gdp_levels(obs, gdp, data.spf_compounding)
                  : cycle_from_potential(obs, gdp);
        break;
      }
    }
    for (const auto& o : obs) {
      int m = o.reference.month_index();
      if (spec.frequency == Frequency::quarterly) m = quarter_end(m);
      if (m < start_month || m > end_month) continue;
      double& cell = p.values(m - start_month, r);
      if (!std::isnan(cell))
        throw ValidationError("series " + spec.id + ": two observations fall in " + month_label(m));
      cell = o.value;
    }
  }

  if (data.scale_mode == ScaleMode::none) {
    p.scales = Vector::Ones(n);
    return p;
  }
  Vector own(n);
  for (Index r = 0; r < n; ++r)
    own(r) = column_difference_sd(p.values, r, freq[static_cast<std::size_t>(r)] == Frequency::quarterly ? 3 : 1);
  auto anchor = [&](Variable v, std::initializer_list<Variable> group, Variable lead) {
    if (data.scale_mode == ScaleMode::per_series) return model.row_of(v);
    bool member = false;
    for (Variable g : group) member = member || g == v;
    if (member && model.has(lead)) return model.row_of(lead);
    return model.row_of(v);
  };
  p.scales.resize(n);
  for (Index r = 0; r < n; ++r) {
    const Variable v = rows[static_cast<std::size_t>(r)];
    Index a = anchor(v, {Variable::cbo, Variable::gdp, Variable::spf_gdp}, Variable::gdp);
    if (a == r) a = anchor(v, {Variable::cpi, Variable::spf_infl, Variable::uom_infl}, Variable::cpi);
    const double s = own(a);
    if (!(s > 0.0) || !std::isfinite(s))
      throw ValidationError("normalization failed for " + p.series_ids[static_cast<std::size_t>(r)] +
                            ": first differences of " + p.series_ids[static_cast<std::size_t>(a)] +
                            " have no positive standard deviation");
    p.scales(r) = s;
    p.values.col(r) /= s;
  }
  return p;
}

}  // namespace rtgap
