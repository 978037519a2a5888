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

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtgap/model.hpp"
#include "rtgap/statespace.hpp"

namespace rtgap {

struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  static Date parse(const std::string& iso);  // YYYY-MM-DD
  std::string str() const;
  // Months since year 0: year * 12 + month - 1.
  int month_index() const { return year * 12 + month - 1; }
  static Date from_month(int month_index, int day = 1);
  auto operator<=>(const Date&) const = default;
};

// "YYYY-MM" for a month index.
std::string month_label(int month_index);
// Accepts YYYY-MM or YYYY-MM-DD.
int parse_month(const std::string& s);
inline bool is_quarter_end(int month_index) { return month_index % 3 == 2; }
// Last month of the quarter containing the month.
inline int quarter_end(int month_index) { return month_index - month_index % 3 + 2; }

struct Observation {
  Date reference;
  double value = 0.0;
};

struct Vintage {
  Date vintage_date;
  std::map<std::string, std::vector<Observation>> series;

  // Strictly increasing references, finite values, nothing after the
  // vintage date.
  void validate() const;
  const std::vector<Observation>& at(const std::string& id) const;
};

// CSV with header series_id,reference_date,value. A row with empty date and
// value declares a series without observations.
Vintage load_vintage(const std::string& path, Date vintage_date);
void write_vintage(const std::string& path, const Vintage& vintage);

struct Release {
  Date release_date;
  std::string series_id;
  std::string vintage_file;
};

struct ReleaseCalendar {
  std::vector<Release> releases;
  void validate() const;
  std::vector<Date> release_dates() const;  // distinct, ascending
};

// CSV with header release_date,series_id,vintage_file. Relative vintage
// paths are kept as written; VintageStore resolves them.
ReleaseCalendar load_calendar(const std::string& path);
void write_calendar(const std::string& path, const ReleaseCalendar& calendar);

// Reassembles the data known at a date from the release calendar: each
// series comes from its latest release on or before that date.
class VintageStore {
 public:
  VintageStore(ReleaseCalendar calendar, std::string base_dir);
  static VintageStore open(const std::string& calendar_path);

  const ReleaseCalendar& calendar() const { return calendar_; }
  const std::string& base_dir() const { return base_dir_; }
  Vintage snapshot(Date as_of) const;
  // Every release regardless of date; used by adversarial tests only.
  Vintage snapshot_ignoring_release_dates(Date as_of) const;

 private:
  const Vintage& file(const Release& r) const;
  ReleaseCalendar calendar_;
  std::string base_dir_;
  mutable std::map<std::string, std::shared_ptr<Vintage>> cache_;
};

enum class Frequency { monthly, quarterly };

enum class SeriesTransform {
  level,           // used as is
  yoy_from_index,  // CPI index to YoY percent
  spf_growth,      // expected growth to expected GDP level
  gap_from_potential,  // potential GDP level to GDP minus potential
};

struct SeriesSpec {
  std::string id;
  Variable role = Variable::gdp;
  Frequency frequency = Frequency::monthly;
  SeriesTransform transform = SeriesTransform::level;
  double unit = 1.0;  // multiplies raw values (e.g. 0.01 for percent growth)
};

enum class SpfCompounding { simple, compound4 };
enum class ScaleMode { shared, per_series, none };

struct DataConfig {
  std::vector<SeriesSpec> series;
  SpfCompounding spf_compounding = SpfCompounding::simple;
  // shared: GDP-unit rows (cbo, gdp, spf_gdp) use the GDP scale and the
  // inflation rows (cpi, spf_infl, uom_infl) the CPI scale. none keeps
  // natural units.
  ScaleMode scale_mode = ScaleMode::shared;

  const SeriesSpec* find(Variable role) const;
  static DataConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// latest_gdp_level * (1 + g) or, compounded, * (1 + g)^4.
double spf_gdp_level(double expected_growth, double latest_gdp_level,
                     SpfCompounding mode = SpfCompounding::simple);

// 100 (P_t / P_{t-12} - 1) on a monthly series; entries without a value
// twelve months earlier are dropped.
std::vector<Observation> cpi_yoy(const std::vector<Observation>& index);

// SPF growth expectations to level expectations, pairing each survey
// quarter with the latest earlier GDP quarter of the same vintage.
std::vector<Observation> spf_gdp_levels(const std::vector<Observation>& growth,
                                        const std::vector<Observation>& gdp,
                                        SpfCompounding mode = SpfCompounding::simple);

// GDP minus potential for every quarter present in both series.
std::vector<Observation> cycle_from_potential(const std::vector<Observation>& potential,
                                              const std::vector<Observation>& gdp);

// Sample standard deviation of first differences between consecutive
// periods of the series' own frequency.
double first_difference_sd(const std::vector<Observation>& obs, Frequency f);

struct Panel {
  int start_month = 0;  // month index of row 0
  std::vector<Variable> rows;
  std::vector<std::string> series_ids;
  Matrix values;  // n_months x rows, normalized, NaN when missing
  Vector scales;

  Index n_time() const { return values.rows(); }
  int end_month() const { return start_month + static_cast<int>(values.rows()) - 1; }
  Matrix natural() const;
  Index count_observed() const;
};

// Places the transformed series on the monthly grid [start_month,
// end_month] in the model's measurement-row order and normalizes them.
Panel build_panel(const Vintage& vintage, const DataConfig& data, const TrendCycleModel& model,
                  int start_month, int end_month);

}  // namespace rtgap
