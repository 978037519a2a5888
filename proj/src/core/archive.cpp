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
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "csv_util.hpp"
#include "rtgap/errors.hpp"
#include "rtgap/sampler.hpp"

namespace rtgap {
using detail::fmt;

namespace {

constexpr char kMagic[8] = {'R', 'T', 'G', 'S', 'T', 'A', 'T', 'E'};

template <class T>
void put(std::ostream& os, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  os.write(reinterpret_cast<const char*>(bits.data()), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bits;
  if (!is.read(reinterpret_cast<char*>(bits.data()), sizeof(T)))
    throw IoError("state archive is truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_draws_csv(const std::string& path, const PosteriorDraws& draws) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "sweep,parameter,value\n";
  for (Index r = 0; r < draws.params.rows(); ++r)
    for (std::size_t k = 0; k < draws.layout.size(); ++k)
      os << draws.sweeps[static_cast<std::size_t>(r)] << ',' << draws.layout[k].name << ','
         << fmt(draws.params(r, static_cast<Index>(k))) << '\n';
  if (!os) throw IoError("write failed for " + path);
}

DrawTable read_draws_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path);
  std::string line;
  if (!std::getline(is, line) || line != "sweep,parameter,value")
    throw ValidationError(path + ": expected header sweep,parameter,value");
  std::map<std::string, std::size_t> col;
  std::vector<std::vector<double>> rows;
  DrawTable t;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string sweep, name, value;
    if (!std::getline(ss, sweep, ',') || !std::getline(ss, name, ',') || !std::getline(ss, value))
      throw ValidationError(path + ":" + std::to_string(lineno) + ": malformed row");
    int s;
    double v;
    try {
      s = std::stoi(sweep);
      v = std::stod(value);
    } catch (const std::exception&) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": malformed number");
    }
    if (t.sweeps.empty() || t.sweeps.back() != s) {
      t.sweeps.push_back(s);
      rows.emplace_back();
    }
    auto [it, inserted] = col.emplace(name, t.names.size());
    if (inserted) t.names.push_back(name);
    auto& row = rows.back();
    if (row.size() <= it->second) row.resize(it->second + 1, std::nan(""));
    row[it->second] = v;
  }
  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != t.names.size())
      throw ValidationError(path + ": sweep " + std::to_string(t.sweeps[r]) + " is incomplete");
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      t.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  return t;
}

void write_state_archive(const std::string& path, const std::vector<Matrix>& states,
                         const std::vector<int>& sweeps) {
  if (states.size() != sweeps.size())
    throw ValidationError("state archive: draws and sweep labels differ in count");
  const std::uint64_t n_time = states.empty() ? 0 : static_cast<std::uint64_t>(states[0].rows());
  const std::uint64_t n_state = states.empty() ? 0 : static_cast<std::uint64_t>(states[0].cols());
  for (const auto& s : states)
    if (static_cast<std::uint64_t>(s.rows()) != n_time ||
        static_cast<std::uint64_t>(s.cols()) != n_state)
      throw ValidationError("state archive: draws differ in shape");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, 0);
  put<std::uint64_t>(os, states.size());
  put<std::uint64_t>(os, n_time);
  put<std::uint64_t>(os, n_state);
  for (int s : sweeps) put<std::int64_t>(os, s);
  for (const auto& m : states)
    for (Index t = 0; t < m.rows(); ++t)
      for (Index j = 0; j < m.cols(); ++j) put<double>(os, m(t, j));
  if (!os) throw IoError("write failed for " + path);
}

StateArchive read_state_archive(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw ValidationError(path + ": not a state archive");
  if (get<std::uint32_t>(is) != 1) throw ValidationError(path + ": unsupported archive version");
  get<std::uint32_t>(is);
  const auto n = get<std::uint64_t>(is);
  const auto n_time = static_cast<Index>(get<std::uint64_t>(is));
  const auto n_state = static_cast<Index>(get<std::uint64_t>(is));
  StateArchive a;
  for (std::uint64_t i = 0; i < n; ++i) a.sweeps.push_back(static_cast<int>(get<std::int64_t>(is)));
  for (std::uint64_t i = 0; i < n; ++i) {
    Matrix m(n_time, n_state);
    for (Index t = 0; t < n_time; ++t)
      for (Index j = 0; j < n_state; ++j) m(t, j) = get<double>(is);
    a.states.push_back(std::move(m));
  }
  return a;
}

}  // namespace rtgap
