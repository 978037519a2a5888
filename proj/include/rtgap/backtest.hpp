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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtgap/data.hpp"
#include "rtgap/model.hpp"
#include "rtgap/sampler.hpp"

namespace rtgap {

enum class TruthMode { final_vintage, first_release };
enum class FailurePolicy { fatal, skip };

struct BacktestConfig {
  Date start = {2005, 1, 1};
  Date end = {2020, 9, 30};
  int presample_years = 20;
  std::vector<int> horizons;  // defaults to 1..36
  TruthMode truth = TruthMode::final_vintage;
  std::optional<Date> truth_vintage;  // defaults to `end`
  std::vector<SpecKind> specs = {SpecKind::undisciplined, SpecKind::tracking};
  FailurePolicy on_failure = FailurePolicy::fatal;
  // Posterior draws averaged into point forecasts and component paths.
  int forecast_draws = 50;
  std::optional<Date> revision_cutoff;

  BacktestConfig();
  void validate() const;
  int grid_start() const { return start.month_index() - 12 * presample_years; }
  nlohmann::json to_json() const;
  static BacktestConfig from_json(const nlohmann::json& j);
};

struct ForecastRecord {
  Date origin;
  SpecKind spec = SpecKind::undisciplined;
  Variable variable = Variable::gdp;
  std::string series_id;
  int target_month = 0;
  int horizon = 0;
  double forecast = 0.0;  // natural units
};

// Smoothed output gap (percent) and potential output (natural units) by
// reference month, as estimated at one origin.
struct ComponentPath {
  Date origin;
  SpecKind spec = SpecKind::undisciplined;
  int start_month = 0;
  Vector gap_pct;
  Vector potential;
};

struct EstimationRecord {
  Date origin;
  SpecKind spec = SpecKind::undisciplined;
  std::vector<std::string> names;
  Vector posterior_mean;
  double mean_acceptance = 0.0;
};

struct TruthValue {
  Variable variable = Variable::gdp;
  std::string series_id;
  int month = 0;
  double value = 0.0;
};

struct BacktestOutput {
  std::vector<ForecastRecord> forecasts;
  std::vector<ComponentPath> paths;
  std::vector<EstimationRecord> estimations;
  std::vector<TruthValue> truth;
  std::vector<std::string> log;
};

// Returns retained posterior parameter draws (rows, bounded scale).
using Estimator =
    std::function<Matrix(const TrendCycleModel&, const Panel&, const SamplerConfig&)>;
Estimator mcmc_estimator();

using SnapshotFn = std::function<Vintage(const VintageStore&, Date)>;
Vintage disciplined_snapshot(const VintageStore& store, Date as_of);

struct BacktestInputs {
  const VintageStore* store = nullptr;
  DataConfig data;
  ModelConfig model;  // kind is overridden per spec
  SamplerConfig sampler;
  BacktestConfig backtest;
  Estimator estimator;    // defaults to mcmc_estimator()
  SnapshotFn snapshot;    // defaults to disciplined_snapshot
};

// Origins: distinct release dates in [start, end].
std::vector<Date> backtest_origins(const ReleaseCalendar& calendar, const BacktestConfig& config);

BacktestOutput run_backtest(const BacktestInputs& inputs);

// Posterior-mean forecasts and smoothed paths at one origin, given
// parameter draws. Targets of quarterly series are quarter-end months.
struct OriginResult {
  std::vector<ForecastRecord> forecasts;
  ComponentPath path;
};
OriginResult forecast_origin(const TrendCycleModel& model, const Panel& panel, const Matrix& draws,
                             const std::vector<int>& horizons, int max_draws, Date origin);

struct MsfeEntry {
  SpecKind spec = SpecKind::undisciplined;
  Variable variable = Variable::gdp;
  std::string series_id;
  int horizon = 0;
  std::optional<double> msfe;  // absent when nothing was evaluable
  int n = 0;
  int n_missing = 0;
};

std::vector<MsfeEntry> msfe(const std::vector<ForecastRecord>& records,
                            const std::vector<TruthValue>& truth);

struct RevisionStats {
  double mean_of_std = 0.0;
  double mean_of_max_abs_revision = 0.0;
  int n_months = 0;
};

// Vintage label to (reference month to value). Labels order the vintages.
using SeriesByVintage = std::map<Date, std::map<int, double>>;
RevisionStats revision_stats(const SeriesByVintage& by_vintage,
                             std::optional<int> cutoff_month = std::nullopt);

// Passes when every origin's panel is unchanged by releases injected after
// that origin.
struct DisciplineReport {
  bool ok = true;
  std::vector<std::string> violations;
};
DisciplineReport check_information_discipline(const VintageStore& store,
                                              const std::vector<Release>& injections,
                                              const std::vector<Date>& origins,
                                              const DataConfig& data,
                                              const TrendCycleModel& model, int grid_start,
                                              const SnapshotFn& snapshot);

// Backtest persistence and reporting.
void write_backtest(const std::string& dir, const BacktestOutput& output);
BacktestOutput read_backtest(const std::string& dir);

struct RevisionRow {
  SpecKind spec = SpecKind::undisciplined;
  std::string quantity;  // output_gap_pct or potential_output
  std::string cutoff;    // empty or YYYY-MM
  RevisionStats stats;
};

struct Report {
  std::vector<MsfeEntry> msfe;
  std::vector<RevisionRow> revisions;
  std::vector<ComponentPath> paths;  // gap and potential per vintage, CSV only
};

Report make_report(const BacktestOutput& output, std::optional<int> cutoff_month = std::nullopt);

enum class ReportFormat { csv, json };
void write_report(const std::string& dir, const Report& report, ReportFormat format);
std::vector<RevisionRow> read_revision_csv(const std::string& path);

}  // namespace rtgap
