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

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "csv_util.hpp"
#include "rtgap/errors.hpp"
#include "rtgap/pipeline.hpp"

namespace rtgap {
namespace {

double quantile_of(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

void accumulate(ComponentSeries& into, const ComponentSeries& c, double w) {
  if (into.variables.empty()) {
    into = c;
    for (auto& v : into.variables) {
      v.business_cycle *= w;
      v.epc *= w;
      v.idiosyncratic *= w;
      v.trend *= w;
      v.bias *= w;
      v.fitted *= w;
    }
    into.gdp_cycle *= w;
    into.gdp_trend *= w;
    into.potential *= w;
    return;
  }
  for (std::size_t i = 0; i < c.variables.size(); ++i) {
    auto& a = into.variables[i];
    const auto& b = c.variables[i];
    a.business_cycle += w * b.business_cycle;
    a.epc += w * b.epc;
    a.idiosyncratic += w * b.idiosyncratic;
    a.trend += w * b.trend;
    a.bias += w * b.bias;
    a.fitted += w * b.fitted;
  }
  if (c.gdp_cycle.size() > 0) {
    into.gdp_cycle += w * c.gdp_cycle;
    into.gdp_trend += w * c.gdp_trend;
    into.potential += w * c.potential;
  }
}

}  // namespace

EstimateResult estimate_vintage(const RunConfig& config, const TrendCycleModel& model,
                                const VintageStore& store, Date vintage) {
  EstimateResult res;
  res.vintage = vintage;
  res.panel = build_panel(store.snapshot(vintage), config.data, model, config.estimation_start(),
                          vintage.month_index());
  res.draws = run_chain(config.sampler, model, res.panel.values);
  const auto& d = res.draws;
  const Index n_time = res.panel.n_time();
  const bool has_gap = model.has(Variable::gdp);

  std::vector<std::vector<double>> gaps;
  if (!d.states.empty()) {
    const double w = 1.0 / static_cast<double>(d.states.size());
    for (std::size_t i = 0; i < d.states.size(); ++i) {
      const Index row = d.state_sweeps[i] - d.sweeps.front();
      const Vector params = d.params.row(row).transpose();
      const ComponentSeries c = extract_components(model, d.states[i], params, res.panel.scales);
      accumulate(res.components, c, w);
      if (has_gap) {
        const Vector g = output_gap_pct(c);
        gaps.emplace_back(g.data(), g.data() + g.size());
      }
    }
  } else {
    const Vector mean = d.posterior_mean();
    const Matrix a = smooth_mean(model.build_system(mean), res.panel.values);
    res.components = extract_components(model, a, mean, res.panel.scales);
    if (has_gap) {
      const Vector g = output_gap_pct(res.components);
      gaps.emplace_back(g.data(), g.data() + g.size());
    }
  }
  if (has_gap) {
    res.gap_pct.resize(n_time);
    res.gap_p05.resize(n_time);
    res.gap_p95.resize(n_time);
    std::vector<double> col(gaps.size());
    for (Index t = 0; t < n_time; ++t) {
      double sum = 0.0;
      for (std::size_t i = 0; i < gaps.size(); ++i) {
        col[i] = gaps[i][static_cast<std::size_t>(t)];
        sum += col[i];
      }
      res.gap_pct(t) = sum / static_cast<double>(gaps.size());
      res.gap_p05(t) = quantile_of(col, 0.05);
      res.gap_p95(t) = quantile_of(col, 0.95);
    }
    res.potential = res.components.potential;
  }
  return res;
}

void write_estimate(const std::string& dir, const TrendCycleModel& model,
                    const EstimateResult& r) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
  using detail::fmt;

  write_draws_csv(path("draws.csv"), r.draws);
  write_state_archive(path("states.bin"), r.draws.states, r.draws.state_sweeps);
  {
    auto os = detail::open_out(path("components.csv"));
    os << "month,variable,business_cycle,epc,idiosyncratic,trend,bias,fitted,observed\n";
    const Matrix nat = r.panel.natural();
    for (std::size_t k = 0; k < r.components.variables.size(); ++k) {
      const auto& c = r.components.variables[k];
      for (Index t = 0; t < r.panel.n_time(); ++t) {
        const double obs = nat(t, static_cast<Index>(k));
        os << month_label(r.panel.start_month + static_cast<int>(t)) << ',' << to_string(c.variable)
           << ',' << fmt(c.business_cycle(t)) << ',' << fmt(c.epc(t)) << ','
           << fmt(c.idiosyncratic(t)) << ',' << fmt(c.trend(t)) << ',' << fmt(c.bias(t)) << ','
           << fmt(c.fitted(t)) << ',' << (std::isnan(obs) ? "" : fmt(obs)) << '\n';
      }
    }
  }
  {
    auto os = detail::open_out(path("gap.csv"));
    os << "month,gap_pct,gap_p05,gap_p95,potential\n";
    for (Index t = 0; t < r.gap_pct.size(); ++t)
      os << month_label(r.panel.start_month + static_cast<int>(t)) << ',' << fmt(r.gap_pct(t)) << ','
         << fmt(r.gap_p05(t)) << ',' << fmt(r.gap_p95(t)) << ',' << fmt(r.potential(t)) << '\n';
  }
  {
    nlohmann::ordered_json j;
    j["spec"] = to_string(model.kind());
    j["vintage"] = r.vintage.str();
    j["grid"] = {month_label(r.panel.start_month), month_label(r.panel.end_month())};
    j["retained_draws"] = r.draws.n_retained();
    j["state_draws"] = r.draws.states.size();
    const int window = static_cast<int>(std::min<Index>(2000, r.draws.accepted.rows()));
    const Vector mean = r.draws.posterior_mean();
    for (std::size_t k = 0; k < r.draws.layout.size(); ++k) {
      const auto& name = r.draws.layout[k].name;
      const Index i = static_cast<Index>(k);
      j["parameters"][name] = {{"mean", mean(i)},
                               {"p05", r.draws.quantile(i, 0.05)},
                               {"p95", r.draws.quantile(i, 0.95)},
                               {"acceptance", r.draws.acceptance_rate(i, window)}};
    }
    for (std::size_t k = 0; k < r.panel.rows.size(); ++k)
      j["scales"][to_string(r.panel.rows[k])] = r.panel.scales(static_cast<Index>(k));
    j["states"] = model.state_names();
    auto os = detail::open_out(path("summary.json"));
    os << j.dump(2) << '\n';
    if (!os) throw IoError("write failed for " + path("summary.json"));
  }
}

}  // namespace rtgap
