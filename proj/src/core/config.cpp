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

#include "rtgap/config.hpp"

#include <filesystem>
#include <fstream>

#include "rtgap/errors.hpp"

namespace rtgap {

void SyntheticConfig::validate() const {
  if (n_months < 24) throw ValidationError("synthetic: need at least 24 months");
  if (n_vintages < 1 || vintage_step < 1) throw ValidationError("synthetic: bad vintage schedule");
  if ((n_vintages - 1) * vintage_step >= n_months - 12)
    throw ValidationError("synthetic: vintage schedule longer than the sample");
  if (!(revision_sd >= 0.0)) throw ValidationError("synthetic: revision_sd must be nonnegative");
}

nlohmann::json SyntheticConfig::to_json() const {
  return {{"start", month_label(start_month)}, {"n_months", n_months},
          {"n_vintages", n_vintages},          {"vintage_step", vintage_step},
          {"revision_sd", revision_sd},        {"parameters", parameters},
          {"seed", seed}};
}

SyntheticConfig SyntheticConfig::from_json(const nlohmann::json& j) {
  SyntheticConfig c;
  try {
    if (j.contains("start")) c.start_month = parse_month(j.at("start").get<std::string>());
    c.n_months = j.value("n_months", c.n_months);
    c.n_vintages = j.value("n_vintages", c.n_vintages);
    c.vintage_step = j.value("vintage_step", c.vintage_step);
    c.revision_sd = j.value("revision_sd", c.revision_sd);
    if (j.contains("parameters")) c.parameters = j.at("parameters").get<std::map<std::string, double>>();
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("synthetic config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return from_json(j, std::filesystem::absolute(path).parent_path().string());
}

RunConfig RunConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  RunConfig c;
  c.base_dir = base_dir;
  try {
    if (j.contains("model")) c.model = ModelConfig::from_json(j.at("model"));
    if (j.contains("sampler")) c.sampler = SamplerConfig::from_json(j.at("sampler"));
    if (j.contains("data")) {
      const auto& d = j.at("data");
      if (d.contains("series")) c.data = DataConfig::from_json(d);
      c.calendar = d.value("calendar", "");
      if (d.contains("grid_start")) c.grid_start = parse_month(d.at("grid_start").get<std::string>());
    }
    if (j.contains("backtest")) c.backtest = BacktestConfig::from_json(j.at("backtest"));
    if (j.contains("synthetic")) c.synthetic = SyntheticConfig::from_json(j.at("synthetic"));
    c.output = j.value("output", c.output);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json data = this->data.to_json();
  data["calendar"] = calendar;
  if (grid_start) data["grid_start"] = month_label(*grid_start);
  return {{"model", model.to_json()},       {"sampler", sampler.to_json()},
          {"data", data},                   {"backtest", backtest.to_json()},
          {"synthetic", synthetic.to_json()}, {"output", output}};
}

std::string RunConfig::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
  return p.string();
}

}  // namespace rtgap
