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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "csv_util.hpp"
#include "rtgap/data.hpp"
#include "rtgap/errors.hpp"

namespace rtgap {
using detail::fmt;
using detail::split_csv;
using detail::strip_cr;

void Vintage::validate() const {
  for (const auto& [id, obs] : series) {
    for (std::size_t i = 0; i < obs.size(); ++i) {
      if (!std::isfinite(obs[i].value))
        throw ValidationError("series " + id + ": non-finite value at " + obs[i].reference.str());
      if (obs[i].reference > vintage_date)
        throw ValidationError("series " + id + ": reference " + obs[i].reference.str() +
                              " is after the vintage date " + vintage_date.str());
      if (i > 0 && !(obs[i - 1].reference < obs[i].reference))
        throw ValidationError("series " + id + ": reference dates not strictly increasing at " +
                              obs[i].reference.str());
    }
  }
}

const std::vector<Observation>& Vintage::at(const std::string& id) const {
  auto it = series.find(id);
  if (it == series.end())
    throw ValidationError("vintage " + vintage_date.str() + " has no series '" + id + "'");
  return it->second;
}

Vintage load_vintage(const std::string& path, Date vintage_date) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read vintage file " + path);
  std::string line;
  if (!std::getline(is, line) || strip_cr(line) != "series_id,reference_date,value")
    throw ValidationError(path + ":1: expected header series_id,reference_date,value");
  Vintage v;
  v.vintage_date = vintage_date;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    const std::string where = path + ":" + std::to_string(lineno) + ": ";
    if (cells.size() != 3 || cells[0].empty()) throw ValidationError(where + "expected 3 fields");
    auto& obs = v.series[cells[0]];
    if (cells[1].empty() && cells[2].empty()) continue;
    Observation o;
    try {
      o.reference = Date::parse(cells[1]);
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
    std::size_t used = 0;
    try {
      o.value = std::stod(cells[2], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cells[2].size() || !std::isfinite(o.value))
      throw ValidationError(where + "malformed value '" + cells[2] + "'");
    obs.push_back(o);
  }
  for (auto& [id, obs] : v.series) {
    std::stable_sort(obs.begin(), obs.end(),
                     [](const Observation& a, const Observation& b) { return a.reference < b.reference; });
  }
  v.validate();
  return v;
}

void write_vintage(const std::string& path, const Vintage& vintage) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "series_id,reference_date,value\n";
  for (const auto& [id, obs] : vintage.series) {
    if (obs.empty()) os << id << ",,\n";
    for (const auto& o : obs) os << id << ',' << o.reference.str() << ',' << fmt(o.value) << '\n';
  }
  if (!os) throw IoError("write failed for " + path);
}

void ReleaseCalendar::validate() const {
  for (std::size_t i = 1; i < releases.size(); ++i)
    if (releases[i].release_date < releases[i - 1].release_date)
      throw ValidationError("release calendar is not in date order at " +
                            releases[i].release_date.str());
}

std::vector<Date> ReleaseCalendar::release_dates() const {
  std::set<Date> s;
  for (const auto& r : releases) s.insert(r.release_date);
  return {s.begin(), s.end()};
}

ReleaseCalendar load_calendar(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read calendar " + path);
  std::string line;
  if (!std::getline(is, line) || strip_cr(line) != "release_date,series_id,vintage_file")
    throw ValidationError(path + ":1: expected header release_date,series_id,vintage_file");
  ReleaseCalendar c;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    const std::string where = path + ":" + std::to_string(lineno) + ": ";
    if (cells.size() != 3 || cells[1].empty() || cells[2].empty())
      throw ValidationError(where + "expected 3 nonempty fields");
    try {
      c.releases.push_back({Date::parse(cells[0]), cells[1], cells[2]});
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
  c.validate();
  return c;
}

void write_calendar(const std::string& path, const ReleaseCalendar& calendar) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "release_date,series_id,vintage_file\n";
  for (const auto& r : calendar.releases)
    os << r.release_date.str() << ',' << r.series_id << ',' << r.vintage_file << '\n';
  if (!os) throw IoError("write failed for " + path);
}

VintageStore::VintageStore(ReleaseCalendar calendar, std::string base_dir)
    : calendar_(std::move(calendar)), base_dir_(std::move(base_dir)) {
  calendar_.validate();
}

VintageStore VintageStore::open(const std::string& calendar_path) {
  return VintageStore(load_calendar(calendar_path),
                      std::filesystem::path(calendar_path).parent_path().string());
}

const Vintage& VintageStore::file(const Release& r) const {
  std::filesystem::path p(r.vintage_file);
  if (p.is_relative() && !base_dir_.empty()) p = std::filesystem::path(base_dir_) / p;
  const std::string key = p.string() + "@" + r.release_date.str();
  auto it = cache_.find(key);
  if (it != cache_.end()) return *it->second;
  if (!std::filesystem::exists(p))
    throw IoError("release " + r.release_date.str() + " of " + r.series_id +
                  ": missing vintage file " + p.string());
  auto v = std::make_shared<Vintage>(load_vintage(p.string(), r.release_date));
  return *cache_.emplace(key, std::move(v)).first->second;
}

Vintage VintageStore::snapshot(Date as_of) const {
  Vintage out;
  out.vintage_date = as_of;
  std::map<std::string, const Release*> latest;
  for (const auto& r : calendar_.releases)
    if (!(as_of < r.release_date)) latest[r.series_id] = &r;
  for (const auto& [id, r] : latest) {
    const Vintage& v = file(*r);
    auto it = v.series.find(id);
    if (it == v.series.end())
      throw ValidationError("vintage file " + r->vintage_file + " lacks series " + id);
    out.series[id] = it->second;
  }
  return out;
}

Vintage VintageStore::snapshot_ignoring_release_dates(Date as_of) const {
  Vintage out;
  out.vintage_date = as_of;
  std::map<std::string, const Release*> latest;
  for (const auto& r : calendar_.releases) latest[r.series_id] = &r;
  for (const auto& [id, r] : latest) {
    const Vintage& v = file(*r);
    auto it = v.series.find(id);
    if (it == v.series.end()) continue;
    for (const auto& o : it->second)
      if (!(as_of < o.reference)) out.series[id].push_back(o);
  }
  return out;
}

}  // namespace rtgap
