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

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rtgap/rtgap.h"

namespace {

int exit_code(rtgap_status s) {
  switch (s) {
    case RTGAP_OK: return 0;
    case RTGAP_ERR_VALIDATION: return 2;
    case RTGAP_ERR_NUMERICAL: return 3;
    default: return 1;
  }
}

int report(rtgap_status s) {
  if (s != RTGAP_OK) {
    std::fprintf(stderr, "rtgap: %s\n", rtgap_last_error());
    if (s == RTGAP_ERR_NUMERICAL && rtgap_last_error_time_index() >= 0)
      std::fprintf(stderr, "rtgap: failure at time index %lld\n",
                   static_cast<long long>(rtgap_last_error_time_index()));
  }
  return exit_code(s);
}

struct ConfigHandle {
  rtgap_config* ptr = nullptr;
  ~ConfigHandle() { rtgap_config_free(ptr); }
};

const char* or_null(const std::optional<std::string>& s) { return s ? s->c_str() : nullptr; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-time trend-cycle estimation and backtesting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rtgap_version()));

  std::string config_path, spec, vintage, input, format = "csv";
  std::optional<std::string> output, cutoff;
  std::optional<uint64_t> seed;
  bool fast = false;

  auto* est = app.add_subcommand("estimate", "Estimate one spec on one data vintage");
  est->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  est->add_option("--spec", spec, "Model spec")->required()->check(CLI::IsMember({"undisciplined", "tracking"}));
  est->add_option("--vintage", vintage, "Vintage date YYYY-MM-DD")->required();
  est->add_option("--seed", seed, "Sampler seed");
  est->add_option("--output", output, "Output directory");

  auto* bt = app.add_subcommand("backtest", "Run the real-time backtest");
  bt->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  bt->add_flag("--fast", fast, "Use 2000/1000 sweeps");
  bt->add_option("--seed", seed, "Sampler seed");
  bt->add_option("--output", output, "Output directory");

  auto* rep = app.add_subcommand("report", "Summarise backtest output");
  rep->add_option("--input", input, "Backtest output directory")->required()->check(CLI::ExistingDirectory);
  rep->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  rep->add_option("--output", output, "Report directory (defaults to the input directory)");
  rep->add_option("--cutoff", cutoff, "Last month included in revision statistics (YYYY-MM)");

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic vintage dataset");
  sim->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  sim->add_option("--seed", seed, "Simulation seed")->required();
  sim->add_option("--output", output, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (rep->parsed())
    return report(rtgap_run_report(input.c_str(), format.c_str(), or_null(output), or_null(cutoff)));

  ConfigHandle cfg;
  if (rtgap_status s = rtgap_config_load(config_path.c_str(), &cfg.ptr); s != RTGAP_OK) return report(s);
  if (seed) rtgap_config_set_seed(cfg.ptr, *seed);

  if (est->parsed()) return report(rtgap_run_estimate(cfg.ptr, spec.c_str(), vintage.c_str(), or_null(output)));

  if (bt->parsed()) {
    if (fast) {
      std::fprintf(stderr, "rtgap: warning: --fast uses 2000/1000 sweeps; full settings are 10000/5000\n");
      if (rtgap_status s = rtgap_config_set_sweeps(cfg.ptr, 2000, 1000); s != RTGAP_OK) return report(s);
    }
    return report(rtgap_run_backtest(cfg.ptr, or_null(output)));
  }

  return report(rtgap_run_simulate(cfg.ptr, or_null(output)));
}
