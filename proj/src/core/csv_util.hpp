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

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rtgap/errors.hpp"

namespace rtgap::detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

// Shortest text that reads back to the same double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Line-oriented reader that checks the header and a fixed field count.
class CsvReader {
 public:
  CsvReader(const std::string& path, const std::string& header) : path_(path), is_(path) {
    if (!is_) throw IoError("cannot read " + path);
    std::string line;
    if (!std::getline(is_, line) || strip_cr(line) != header)
      throw ValidationError(path + ":1: expected header " + header);
    fields_ = split_csv(header).size();
  }

  bool next(std::vector<std::string>& cells) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_;
      line = strip_cr(line);
      if (line.empty()) continue;
      cells = split_csv(line);
      if (cells.size() != fields_) fail("expected " + std::to_string(fields_) + " fields");
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError(path_ + ":" + std::to_string(line_) + ": " + what);
  }

  double number(const std::string& cell) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size()) fail("malformed number '" + cell + "'");
    return v;
  }

  int integer(const std::string& cell) const {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size()) fail("malformed integer '" + cell + "'");
    return v;
  }

  int line() const { return line_; }

 private:
  std::string path_;
  std::ifstream is_;
  std::size_t fields_ = 0;
  int line_ = 1;
};

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  return os;
}

}  // namespace rtgap::detail
