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

#include <string>
#include <vector>

#include "rtgap/config.hpp"
#include "rtgap/data.hpp"
#include "rtgap/model.hpp"
#include "rtgap/sampler.hpp"

namespace rtgap {

// Default data-generating parameters for synthetic experiments, with the
// config overrides applied.
Vector synthetic_parameters(const TrendCycleModel& model,
                            const std::map<std::string, double>& overrides = {});
// Starting state: trends at positive levels, cycles at zero.
Vector synthetic_start(const TrendCycleModel& model);

struct SyntheticDataset {
  int start_month = 0;
  Vector parameters;
  Matrix states;        // n_months x n_state
  Matrix observations;  // natural units, quarterly rows only at quarter ends
  std::vector<Vintage> vintages;
  ReleaseCalendar calendar;  // one release per series and vintage
  DataConfig data;           // series ids are the variable names
};

SyntheticDataset simulate_dataset(const TrendCycleModel& model, const SyntheticConfig& config);

// Writes vintages/, calendar.csv, config.json, truth_states.csv and
// truth_parameters.json.
void write_dataset(const std::string& dir, const TrendCycleModel& model,
                   const SyntheticDataset& data);

struct EstimateResult {
  Date vintage;
  Panel panel;
  PosteriorDraws draws;
  // Posterior-mean decomposition (averaged over state draws when kept).
  ComponentSeries components;
  Vector gap_pct;
  Vector gap_p05;
  Vector gap_p95;
  Vector potential;
};

EstimateResult estimate_vintage(const RunConfig& config, const TrendCycleModel& model,
                                const VintageStore& store, Date vintage);

// Writes draws.csv, states.bin, components.csv, gap.csv and summary.json.
void write_estimate(const std::string& dir, const TrendCycleModel& model,
                    const EstimateResult& result);

}  // namespace rtgap
