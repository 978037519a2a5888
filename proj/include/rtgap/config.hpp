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

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "rtgap/backtest.hpp"
#include "rtgap/data.hpp"
#include "rtgap/model.hpp"
#include "rtgap/sampler.hpp"

namespace rtgap {

struct SyntheticConfig {
  int start_month = 1985 * 12;
  int n_months = 360;
  // Vintages released every `vintage_step` months, the last one holding
  // the full sample.
  int n_vintages = 1;
  int vintage_step = 1;
  // Noise added to every value of a non-final vintage.
  double revision_sd = 0.0;
  std::map<std::string, double> parameters;  // overrides of the defaults
  std::uint64_t seed = 1;

  void validate() const;
  nlohmann::json to_json() const;
  static SyntheticConfig from_json(const nlohmann::json& j);
};

// Everything a command needs. Relative paths resolve against base_dir, the
// directory of the config file.
struct RunConfig {
  std::string base_dir;
  ModelConfig model;
  SamplerConfig sampler;
  DataConfig data;
  BacktestConfig backtest;
  SyntheticConfig synthetic;
  std::string calendar;  // release calendar CSV
  std::string output = "output";
  std::optional<int> grid_start;  // estimation grid start; defaults to backtest presample start

  static RunConfig load(const std::string& path);
  static RunConfig from_json(const nlohmann::json& j, const std::string& base_dir = "");
  nlohmann::json to_json() const;

  std::string resolve(const std::string& path) const;
  int estimation_start() const { return grid_start.value_or(backtest.grid_start()); }
};

}  // namespace rtgap
