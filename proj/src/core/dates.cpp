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

#include <chrono>
#include <cstdio>

#include "rtgap/data.hpp"
#include "rtgap/errors.hpp"

namespace rtgap {
namespace {

bool parse_ints(const std::string& s, int& y, int& m, int& d, bool with_day) {
  const std::size_t want = with_day ? 10 : 7;
  if (s.size() != want || s[4] != '-' || (with_day && s[7] != '-')) return false;
  for (std::size_t i = 0; i < want; ++i)
    if (i != 4 && i != 7 && (s[i] < '0' || s[i] > '9')) return false;
  y = std::stoi(s.substr(0, 4));
  m = std::stoi(s.substr(5, 2));
  d = with_day ? std::stoi(s.substr(8, 2)) : 1;
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                     std::chrono::day{unsigned(d)}}
      .ok();
}

}  // namespace

Date Date::parse(const std::string& iso) {
  Date d;
  if (!parse_ints(iso, d.year, d.month, d.day, true))
    throw ValidationError("invalid date '" + iso + "', expected YYYY-MM-DD");
  return d;
}

std::string Date::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date Date::from_month(int month_index, int day) {
  return {month_index / 12, month_index % 12 + 1, day};
}

std::string month_label(int month_index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", month_index / 12, month_index % 12 + 1);
  return buf;
}

int parse_month(const std::string& s) {
  int y, m, d;
  if (parse_ints(s, y, m, d, false) || parse_ints(s, y, m, d, true)) return y * 12 + m - 1;
  throw ValidationError("invalid month '" + s + "', expected YYYY-MM");
}

}  // namespace rtgap
