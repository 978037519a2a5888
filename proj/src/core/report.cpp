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

#include <filesystem>
#include <map>

#include "csv_util.hpp"
#include "rtgap/backtest.hpp"
#include "rtgap/errors.hpp"

namespace rtgap {
namespace {

using detail::CsvReader;
using detail::fmt;
using detail::open_out;

namespace fs = std::filesystem;

std::string path_in(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

void finish(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw IoError("write failed for " + path);
}

void write_paths(const std::string& p, const std::vector<ComponentPath>& paths) {
  auto os = open_out(p);
  os << "origin,spec,month,gap_pct,potential\n";
  for (const auto& c : paths)
    for (Index t = 0; t < c.gap_pct.size(); ++t)
      os << c.origin.str() << ',' << to_string(c.spec) << ','
         << month_label(c.start_month + static_cast<int>(t)) << ',' << fmt(c.gap_pct(t)) << ','
         << fmt(c.potential(t)) << '\n';
  finish(os, p);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir);
}

std::string quantity_gap() { return "output_gap_pct"; }
std::string quantity_potential() { return "potential_output"; }

}  // namespace

void write_backtest(const std::string& dir, const BacktestOutput& out) {
  ensure_dir(dir);
  {
    const auto p = path_in(dir, "forecasts.csv");
    auto os = open_out(p);
    os << "origin,spec,variable,series_id,target_month,horizon,forecast\n";
    for (const auto& r : out.forecasts)
      os << r.origin.str() << ',' << to_string(r.spec) << ',' << to_string(r.variable) << ','
         << r.series_id << ',' << month_label(r.target_month) << ',' << r.horizon << ','
         << fmt(r.forecast) << '\n';
    finish(os, p);
  }
  write_paths(path_in(dir, "paths.csv"), out.paths);
  {
    const auto p = path_in(dir, "estimations.csv");
    auto os = open_out(p);
    os << "origin,spec,parameter,posterior_mean\n";
    for (const auto& e : out.estimations)
      for (std::size_t k = 0; k < e.names.size(); ++k)
        os << e.origin.str() << ',' << to_string(e.spec) << ',' << e.names[k] << ','
           << fmt(e.posterior_mean(static_cast<Index>(k))) << '\n';
    finish(os, p);
  }
  {
    const auto p = path_in(dir, "truth.csv");
    auto os = open_out(p);
    os << "variable,series_id,month,value\n";
    for (const auto& t : out.truth)
      os << to_string(t.variable) << ',' << t.series_id << ',' << month_label(t.month) << ','
         << fmt(t.value) << '\n';
    finish(os, p);
  }
  {
    const auto p = path_in(dir, "log.txt");
    auto os = open_out(p);
    for (const auto& l : out.log) os << l << '\n';
    finish(os, p);
  }
}

BacktestOutput read_backtest(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("no backtest output in " + dir);
  BacktestOutput out;
  std::vector<std::string> c;
  {
    CsvReader r(path_in(dir, "forecasts.csv"),
                "origin,spec,variable,series_id,target_month,horizon,forecast");
    while (r.next(c))
      out.forecasts.push_back({Date::parse(c[0]), spec_from_string(c[1]), variable_from_string(c[2]),
                               c[3], parse_month(c[4]), r.integer(c[5]), r.number(c[6])});
  }
  {
    CsvReader r(path_in(dir, "paths.csv"), "origin,spec,month,gap_pct,potential");
    std::vector<double> gap, pot;
    auto flush = [&] {
      if (out.paths.empty()) return;
      out.paths.back().gap_pct = Eigen::Map<Vector>(gap.data(), static_cast<Index>(gap.size()));
      out.paths.back().potential = Eigen::Map<Vector>(pot.data(), static_cast<Index>(pot.size()));
      gap.clear();
      pot.clear();
    };
    while (r.next(c)) {
      const Date origin = Date::parse(c[0]);
      const SpecKind spec = spec_from_string(c[1]);
      const int month = parse_month(c[2]);
      if (out.paths.empty() || out.paths.back().origin != origin || out.paths.back().spec != spec) {
        flush();
        out.paths.push_back({origin, spec, month, {}, {}});
      } else if (month != out.paths.back().start_month + static_cast<int>(gap.size())) {
        r.fail("months of a path must be consecutive");
      }
      gap.push_back(r.number(c[3]));
      pot.push_back(r.number(c[4]));
    }
    flush();
  }
  {
    CsvReader r(path_in(dir, "estimations.csv"), "origin,spec,parameter,posterior_mean");
    std::vector<double> vals;
    auto flush = [&] {
      if (!out.estimations.empty())
        out.estimations.back().posterior_mean = Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()));
      vals.clear();
    };
    while (r.next(c)) {
      const Date origin = Date::parse(c[0]);
      const SpecKind spec = spec_from_string(c[1]);
      if (out.estimations.empty() || out.estimations.back().origin != origin ||
          out.estimations.back().spec != spec) {
        flush();
        out.estimations.push_back({origin, spec, {}, {}, 0.0});
      }
      out.estimations.back().names.push_back(c[2]);
      vals.push_back(r.number(c[3]));
    }
    flush();
  }
  {
    CsvReader r(path_in(dir, "truth.csv"), "variable,series_id,month,value");
    while (r.next(c))
      out.truth.push_back({variable_from_string(c[0]), c[1], parse_month(c[2]), r.number(c[3])});
  }
  std::ifstream log(path_in(dir, "log.txt"));
  for (std::string line; std::getline(log, line);) out.log.push_back(line);
  return out;
}

Report make_report(const BacktestOutput& output, std::optional<int> cutoff_month) {
  Report rep;
  rep.msfe = msfe(output.forecasts, output.truth);
  rep.paths = output.paths;
  for (SpecKind spec : {SpecKind::undisciplined, SpecKind::tracking}) {
    SeriesByVintage gap, pot;
    for (const auto& p : output.paths) {
      if (p.spec != spec) continue;
      auto& g = gap[p.origin];
      auto& q = pot[p.origin];
      for (Index t = 0; t < p.gap_pct.size(); ++t) {
        g[p.start_month + static_cast<int>(t)] = p.gap_pct(t);
        q[p.start_month + static_cast<int>(t)] = p.potential(t);
      }
    }
    std::vector<std::optional<int>> cutoffs = {std::nullopt};
    if (cutoff_month) cutoffs.push_back(cutoff_month);
    for (const auto& cut : cutoffs)
      for (const auto& [name, series] : {std::pair{quantity_gap(), &gap}, std::pair{quantity_potential(), &pot}}) {
        try {
          rep.revisions.push_back({spec, name, cut ? month_label(*cut) : "", revision_stats(*series, cut)});
        } catch (const ValidationError&) {
          // fewer than two overlapping vintages
        }
      }
  }
  return rep;
}

void write_report(const std::string& dir, const Report& report, ReportFormat format) {
  ensure_dir(dir);
  if (format == ReportFormat::csv) {
    {
      const auto p = path_in(dir, "msfe.csv");
      auto os = open_out(p);
      os << "spec,variable,series_id,horizon,msfe,n,n_missing\n";
      for (const auto& e : report.msfe)
        os << to_string(e.spec) << ',' << to_string(e.variable) << ',' << e.series_id << ','
           << e.horizon << ',' << (e.msfe ? fmt(*e.msfe) : "") << ',' << e.n << ',' << e.n_missing
           << '\n';
      finish(os, p);
    }
    write_paths(path_in(dir, "gap_paths.csv"), report.paths);
    const auto p = path_in(dir, "revision_stats.csv");
    auto os = open_out(p);
    os << "spec,quantity,cutoff,mean_of_std,mean_of_max_abs_revision,n_months\n";
    for (const auto& r : report.revisions)
      os << to_string(r.spec) << ',' << r.quantity << ',' << r.cutoff << ','
         << fmt(r.stats.mean_of_std) << ',' << fmt(r.stats.mean_of_max_abs_revision) << ','
         << r.stats.n_months << '\n';
    finish(os, p);
    return;
  }
  nlohmann::json j;
  j["msfe"] = nlohmann::json::array();
  for (const auto& e : report.msfe) {
    nlohmann::json row = {{"spec", to_string(e.spec)},     {"variable", to_string(e.variable)},
                          {"series_id", e.series_id},      {"horizon", e.horizon},
                          {"n", e.n},                      {"n_missing", e.n_missing}};
    row["msfe"] = e.msfe ? nlohmann::json(*e.msfe) : nlohmann::json(nullptr);
    j["msfe"].push_back(row);
  }
  j["revision_stats"] = nlohmann::json::array();
  for (const auto& r : report.revisions)
    j["revision_stats"].push_back({{"spec", to_string(r.spec)},
                                   {"quantity", r.quantity},
                                   {"cutoff", r.cutoff},
                                   {"mean_of_std", r.stats.mean_of_std},
                                   {"mean_of_max_abs_revision", r.stats.mean_of_max_abs_revision},
                                   {"n_months", r.stats.n_months}});
  const auto p = path_in(dir, "report.json");
  auto os = open_out(p);
  os << j.dump(2) << '\n';
  finish(os, p);
}

std::vector<RevisionRow> read_revision_csv(const std::string& path) {
  CsvReader r(path, "spec,quantity,cutoff,mean_of_std,mean_of_max_abs_revision,n_months");
  std::vector<RevisionRow> out;
  std::vector<std::string> c;
  while (r.next(c))
    out.push_back({spec_from_string(c[0]), c[1], c[2],
                   {r.number(c[3]), r.number(c[4]), r.integer(c[5])}});
  return out;
}

}  // namespace rtgap
