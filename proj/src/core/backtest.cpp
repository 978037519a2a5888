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

#include "rtgap/backtest.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "rtgap/errors.hpp"

namespace rtgap {
namespace {

[[noreturn]] void rethrow_with(const std::string& context) {
  try {
    throw;
  } catch (const ValidationError& e) {
    throw ValidationError(context + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context + e.what(), e.time_index());
  } catch (const IoError& e) {
    throw IoError(context + e.what());
  } catch (const Error& e) {
    throw Error(context + e.what());
  }
}

std::vector<Index> thin_rows(Index n, int max_rows) {
  std::vector<Index> rows;
  if (n <= max_rows) {
    rows.resize(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Index{0});
    return rows;
  }
  for (int i = 0; i < max_rows; ++i) rows.push_back(static_cast<Index>(i) * n / max_rows);
  return rows;
}

bool same_panel(const Panel& a, const Panel& b) {
  if (a.start_month != b.start_month || a.values.rows() != b.values.rows() ||
      a.values.cols() != b.values.cols() || a.scales != b.scales)
    return false;
  for (Index t = 0; t < a.values.rows(); ++t)
    for (Index r = 0; r < a.values.cols(); ++r) {
      const double x = a.values(t, r), y = b.values(t, r);
      if (std::isnan(x) != std::isnan(y)) return false;
      if (!std::isnan(x) && x != y) return false;
    }
  return true;
}

ModelConfig truth_model(const BacktestInputs& in) {
  ModelConfig c = in.model;
  c.kind = SpecKind::undisciplined;
  for (SpecKind k : in.backtest.specs)
    if (k == SpecKind::tracking) c.kind = SpecKind::tracking;
  return c;
}

std::vector<TruthValue> panel_truth(const Panel& p) {
  std::vector<TruthValue> out;
  const Matrix nat = p.natural();
  for (Index r = 0; r < nat.cols(); ++r)
    for (Index t = 0; t < nat.rows(); ++t)
      if (!std::isnan(nat(t, r)))
        out.push_back({p.rows[static_cast<std::size_t>(r)], p.series_ids[static_cast<std::size_t>(r)],
                       p.start_month + static_cast<int>(t), nat(t, r)});
  return out;
}

}  // namespace

BacktestConfig::BacktestConfig() {
  for (int h = 1; h <= 36; ++h) horizons.push_back(h);
}

void BacktestConfig::validate() const {
  if (!(start < end)) throw ValidationError("backtest: start must precede end");
  if (horizons.empty()) throw ValidationError("backtest: no horizons");
  for (int h : horizons)
    if (h < 1) throw ValidationError("backtest: horizons must be positive");
  if (presample_years < 0) throw ValidationError("backtest: negative presample");
  if (specs.empty()) throw ValidationError("backtest: no model kinds selected");
  if (forecast_draws < 1) throw ValidationError("backtest: forecast_draws must be positive");
}

nlohmann::json BacktestConfig::to_json() const {
  nlohmann::json j = {{"start", start.str()},
                      {"end", end.str()},
                      {"presample_years", presample_years},
                      {"horizons", horizons},
                      {"truth", truth == TruthMode::final_vintage ? "final_vintage" : "first_release"},
                      {"on_failure", on_failure == FailurePolicy::fatal ? "fatal" : "skip"},
                      {"forecast_draws", forecast_draws}};
  j["specs"] = nlohmann::json::array();
  for (SpecKind k : specs) j["specs"].push_back(to_string(k));
  if (truth_vintage) j["truth_vintage"] = truth_vintage->str();
  if (revision_cutoff) j["revision_cutoff"] = revision_cutoff->str();
  return j;
}

BacktestConfig BacktestConfig::from_json(const nlohmann::json& j) {
  BacktestConfig c;
  try {
    if (j.contains("start")) c.start = Date::parse(j.at("start").get<std::string>());
    if (j.contains("end")) c.end = Date::parse(j.at("end").get<std::string>());
    c.presample_years = j.value("presample_years", c.presample_years);
    if (j.contains("horizons")) c.horizons = j.at("horizons").get<std::vector<int>>();
    if (j.contains("max_horizon")) {
      c.horizons.clear();
      for (int h = 1; h <= j.at("max_horizon").get<int>(); ++h) c.horizons.push_back(h);
    }
    const std::string truth = j.value("truth", "final_vintage");
    if (truth == "final_vintage") c.truth = TruthMode::final_vintage;
    else if (truth == "first_release") c.truth = TruthMode::first_release;
    else throw ValidationError("backtest: unknown truth mode '" + truth + "'");
    if (j.contains("truth_vintage")) c.truth_vintage = Date::parse(j.at("truth_vintage").get<std::string>());
    if (j.contains("specs")) {
      c.specs.clear();
      for (const auto& s : j.at("specs")) c.specs.push_back(spec_from_string(s.get<std::string>()));
    }
    const std::string fail = j.value("on_failure", "fatal");
    if (fail == "fatal") c.on_failure = FailurePolicy::fatal;
    else if (fail == "skip") c.on_failure = FailurePolicy::skip;
    else throw ValidationError("backtest: unknown on_failure '" + fail + "'");
    c.forecast_draws = j.value("forecast_draws", c.forecast_draws);
    if (j.contains("revision_cutoff"))
      c.revision_cutoff = Date::parse(j.at("revision_cutoff").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("backtest config: ") + e.what());
  }
  c.validate();
  return c;
}

Estimator mcmc_estimator() {
  return [](const TrendCycleModel& model, const Panel& panel, const SamplerConfig& sampler) {
    SamplerConfig s = sampler;
    s.state_draws = false;
    return run_chain(s, model, panel.values).params;
  };
}

Vintage disciplined_snapshot(const VintageStore& store, Date as_of) { return store.snapshot(as_of); }

std::vector<Date> backtest_origins(const ReleaseCalendar& calendar, const BacktestConfig& config) {
  std::vector<Date> out;
  for (const Date& d : calendar.release_dates())
    if (!(d < config.start) && !(config.end < d)) out.push_back(d);
  return out;
}

OriginResult forecast_origin(const TrendCycleModel& model, const Panel& panel, const Matrix& draws,
                             const std::vector<int>& horizons, int max_draws, Date origin) {
  if (draws.rows() == 0) throw ValidationError("no parameter draws to forecast with");
  const auto rows = thin_rows(draws.rows(), max_draws);
  const int max_h = *std::max_element(horizons.begin(), horizons.end());
  const Index n_obs = static_cast<Index>(model.observables().size());
  Matrix fc = Matrix::Zero(max_h, n_obs);
  Vector gap = Vector::Zero(panel.n_time()), potential = Vector::Zero(panel.n_time());

  for (Index i : rows) {
    const Vector params = draws.row(i).transpose();
    const SystemMatrices sys = model.build_system(params);
    const FilterOutput f = filter_diffuse(sys, panel.values);
    const ForecastPath path = forecast(sys, f.filtered_mean.back(), f.filtered_cov.back(), max_h);
    for (int h = 0; h < max_h; ++h) fc.row(h) += path.obs_mean[static_cast<std::size_t>(h)].transpose();
    const Matrix smoothed = smooth_mean(sys, panel.values);
    const ComponentSeries comp = extract_components(model, smoothed, params, panel.scales);
    gap += output_gap_pct(comp);
    potential += comp.potential;
  }
  const double k = static_cast<double>(rows.size());
  OriginResult out;
  for (int h : horizons) {
    const int target = panel.end_month() + h;
    for (Index r = 0; r < n_obs; ++r) {
      const Variable v = model.observables()[static_cast<std::size_t>(r)];
      if (is_quarterly(v) && !is_quarter_end(target)) continue;
      out.forecasts.push_back({origin, model.kind(), v, panel.series_ids[static_cast<std::size_t>(r)],
                               target, h, fc(h - 1, r) / k * panel.scales(r)});
    }
  }
  out.path = {origin, model.kind(), panel.start_month, gap / k, potential / k};
  return out;
}

BacktestOutput run_backtest(const BacktestInputs& in) {
  if (in.store == nullptr) throw ValidationError("backtest: no vintage store");
  in.backtest.validate();
  in.sampler.validate();
  const Estimator estimator = in.estimator ? in.estimator : mcmc_estimator();
  const SnapshotFn snapshot = in.snapshot ? in.snapshot : SnapshotFn(disciplined_snapshot);
  const auto origins = backtest_origins(in.store->calendar(), in.backtest);
  const int grid_start = in.backtest.grid_start();

  BacktestOutput out;
  for (std::size_t s = 0; s < in.backtest.specs.size(); ++s) {
    ModelConfig mc = in.model;
    mc.kind = in.backtest.specs[s];
    const TrendCycleModel model(mc);
    Matrix draws;
    int year = INT_MIN;
    for (const Date& origin : origins) {
      const std::string context = std::string(to_string(mc.kind)) + " origin " + origin.str() + ": ";
      try {
        const Vintage vintage = snapshot(*in.store, origin);
        const Panel panel = build_panel(vintage, in.data, model, grid_start, origin.month_index());
        if (origin.year != year) {
          year = origin.year;
          SamplerConfig sc = in.sampler;
          sc.seed = in.sampler.seed + 1000003ULL * static_cast<std::uint64_t>(origin.year) + s;
          try {
            draws = estimator(model, panel, sc);
          } catch (const Error& e) {
            if (in.backtest.on_failure == FailurePolicy::fatal) throw;
            out.log.push_back(context + "estimation failed, keeping earlier parameters: " + e.what());
          }
          if (draws.rows() > 0 && draws.cols() == static_cast<Index>(model.parameters().size())) {
            EstimationRecord rec{origin, mc.kind, {}, draws.colwise().mean().transpose(), 0.0};
            for (const auto& p : model.parameters()) rec.names.push_back(p.name);
            out.estimations.push_back(std::move(rec));
          }
        }
        if (draws.rows() == 0) {
          out.log.push_back(context + "skipped, no parameters available");
          continue;
        }
        OriginResult r = forecast_origin(model, panel, draws, in.backtest.horizons,
                                         in.backtest.forecast_draws, origin);
        out.forecasts.insert(out.forecasts.end(), r.forecasts.begin(), r.forecasts.end());
        out.paths.push_back(std::move(r.path));
      } catch (const Error& e) {
        if (in.backtest.on_failure == FailurePolicy::fatal) rethrow_with(context);
        out.log.push_back(context + "skipped: " + e.what());
      }
    }
  }

  // outturns
  const TrendCycleModel tm(truth_model(in));
  int last = in.backtest.end.month_index();
  for (int h : in.backtest.horizons) last = std::max(last, in.backtest.end.month_index() + h);
  try {
    if (in.backtest.truth == TruthMode::final_vintage) {
      const Date at = in.backtest.truth_vintage.value_or(in.backtest.end);
      out.truth = panel_truth(build_panel(snapshot(*in.store, at), in.data, tm, grid_start, last));
    } else {
      std::map<std::pair<int, int>, TruthValue> first;
      for (const Date& d : in.store->calendar().release_dates()) {
        Panel p;
        try {
          p = build_panel(snapshot(*in.store, d), in.data, tm, grid_start, last);
        } catch (const ValidationError&) {
          continue;  // too little data for normalization yet
        }
        for (const auto& tv : panel_truth(p))
          first.emplace(std::make_pair(static_cast<int>(tv.variable), tv.month), tv);
      }
      for (auto& [key, tv] : first) out.truth.push_back(tv);
    }
  } catch (const Error&) {
    rethrow_with("outturns: ");
  }
  return out;
}

std::vector<MsfeEntry> msfe(const std::vector<ForecastRecord>& records,
                            const std::vector<TruthValue>& truth) {
  std::map<std::pair<int, int>, double> outturn;
  for (const auto& t : truth) outturn[{static_cast<int>(t.variable), t.month}] = t.value;
  struct Acc {
    double sum = 0.0;
    int n = 0;
    int missing = 0;
    std::string id;
  };
  std::map<std::tuple<int, int, int>, Acc> acc;
  for (const auto& r : records) {
    auto& a = acc[{static_cast<int>(r.spec), static_cast<int>(r.variable), r.horizon}];
    a.id = r.series_id;
    auto it = outturn.find({static_cast<int>(r.variable), r.target_month});
    if (it == outturn.end()) {
      ++a.missing;
      continue;
    }
    const double e = r.forecast - it->second;
    a.sum += e * e;
    ++a.n;
  }
  std::vector<MsfeEntry> out;
  for (const auto& [key, a] : acc) {
    MsfeEntry e;
    e.spec = static_cast<SpecKind>(std::get<0>(key));
    e.variable = static_cast<Variable>(std::get<1>(key));
    e.horizon = std::get<2>(key);
    e.series_id = a.id;
    e.n = a.n;
    e.n_missing = a.missing;
    if (a.n > 0) e.msfe = a.sum / a.n;
    out.push_back(e);
  }
  return out;
}

RevisionStats revision_stats(const SeriesByVintage& by_vintage, std::optional<int> cutoff_month) {
  std::map<int, std::vector<double>> by_month;  // values in vintage order
  for (const auto& [label, series] : by_vintage)
    for (const auto& [month, value] : series)
      if (!cutoff_month || month <= *cutoff_month) by_month[month].push_back(value);
  RevisionStats s;
  double sum_sd = 0.0, sum_rev = 0.0;
  for (const auto& [month, v] : by_month) {
    if (v.size() < 2) continue;
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0, max_rev = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      ss += (v[i] - mean) * (v[i] - mean);
      if (i > 0) max_rev = std::max(max_rev, std::abs(v[i] - v[i - 1]));
    }
    sum_sd += std::sqrt(ss / (n - 1.0));
    sum_rev += max_rev;
    ++s.n_months;
  }
  if (s.n_months == 0)
    throw ValidationError("revision statistics need a reference month shared by two vintages");
  s.mean_of_std = sum_sd / s.n_months;
  s.mean_of_max_abs_revision = sum_rev / s.n_months;
  return s;
}

DisciplineReport check_information_discipline(const VintageStore& store,
                                              const std::vector<Release>& injections,
                                              const std::vector<Date>& origins,
                                              const DataConfig& data,
                                              const TrendCycleModel& model, int grid_start,
                                              const SnapshotFn& snapshot) {
  DisciplineReport rep;
  for (const Date& origin : origins) {
    ReleaseCalendar cal = store.calendar();
    for (const auto& r : injections)
      if (origin < r.release_date) cal.releases.push_back(r);
    std::stable_sort(cal.releases.begin(), cal.releases.end(),
                     [](const Release& a, const Release& b) { return a.release_date < b.release_date; });
    const VintageStore injected(cal, store.base_dir());
    std::optional<Panel> a, b;
    std::string err_a, err_b;
    try {
      a = build_panel(snapshot(store, origin), data, model, grid_start, origin.month_index());
    } catch (const Error& e) {
      err_a = e.what();
    }
    try {
      b = build_panel(snapshot(injected, origin), data, model, grid_start, origin.month_index());
    } catch (const Error& e) {
      err_b = e.what();
    }
    const bool same = (a && b) ? same_panel(*a, *b) : (!a && !b && err_a == err_b);
    if (!same) {
      rep.ok = false;
      rep.violations.push_back("origin " + origin.str() + ": panel depends on data released later");
    }
  }
  return rep;
}

}  // namespace rtgap
