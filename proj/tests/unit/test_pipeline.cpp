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

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "rtgap/config.hpp"
#include "rtgap/errors.hpp"
#include "rtgap/pipeline.hpp"

using namespace rtgap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("rtgap_pipe_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("run configuration JSON round trip and errors") {
  const auto j = nlohmann::json::parse(R"({
    "model": {"kind": "tracking", "variables": ["unemp", "gdp", "cpi"]},
    "sampler": {"n_iter": 400, "burn_in": 200, "seed": 9, "accept_window": 50},
    "data": {"calendar": "cal.csv", "grid_start": "1990-01",
             "series": [{"id": "GDPC1", "role": "gdp", "frequency": "quarterly"},
                        {"id": "CBOGAP", "role": "cbo", "frequency": "quarterly", "transform": "gap_from_potential"},
                        {"id": "UNRATE", "role": "unemp"},
                        {"id": "CPIAUCSL", "role": "cpi", "transform": "yoy_from_index"}]},
    "backtest": {"start": "2006-01-01", "end": "2010-12-31", "max_horizon": 12, "specs": ["tracking"]},
    "synthetic": {"start": "1980-01", "n_months": 240, "n_vintages": 3, "parameters": {"rho_gap": 0.9}},
    "output": "out"
  })");
  const auto c = RunConfig::from_json(j, "/base");
  CHECK(c.model.kind == SpecKind::tracking);
  CHECK(c.model.variables == std::vector<Variable>{Variable::gdp, Variable::unemp, Variable::cpi});
  CHECK(c.sampler.n_iter == 400);
  CHECK(c.sampler.accept_window == 50);
  CHECK(c.data.series.size() == 4);
  CHECK(c.calendar == "cal.csv");
  CHECK(c.resolve(c.calendar) == (fs::path("/base") / "cal.csv").string());
  CHECK(c.estimation_start() == parse_month("1990-01"));
  CHECK(c.backtest.horizons.size() == 12);
  CHECK(c.synthetic.parameters.at("rho_gap") == 0.9);
  const auto again = RunConfig::from_json(c.to_json(), "/base");
  CHECK(again.to_json() == c.to_json());

  auto bad = j;
  bad["sampler"]["burn_in"] = 500;
  CHECK_THROWS_AS(RunConfig::from_json(bad), ValidationError);
  bad = j;
  bad["model"]["kind"] = "loose";
  CHECK_THROWS_AS(RunConfig::from_json(bad), ValidationError);
  bad = j;
  bad["backtest"]["end"] = "2001-01-01";
  CHECK_THROWS_AS(RunConfig::from_json(bad), ValidationError);
  bad = j;
  bad["synthetic"]["parameters"] = {{"rho_nothing", 0.1}};
  const auto odd = RunConfig::from_json(bad);
  CHECK_THROWS_AS(simulate_dataset(TrendCycleModel(odd.model), odd.synthetic), ValidationError);
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/config.json"), IoError);
}

TEST_CASE("synthetic datasets mask, date and release consistently") {
  ModelConfig mc;
  mc.variables = {Variable::gdp, Variable::unemp, Variable::spf_infl};
  const TrendCycleModel model(mc);
  SyntheticConfig sc;
  sc.start_month = parse_month("2000-01");
  sc.n_months = 60;
  sc.n_vintages = 4;
  sc.vintage_step = 3;
  sc.seed = 17;
  const auto d = simulate_dataset(model, sc);
  CHECK(d.observations.rows() == 60);
  CHECK(d.states.rows() == 60);
  REQUIRE(d.vintages.size() == 4);
  CHECK(d.calendar.releases.size() == 12);
  CHECK(d.vintages.back().vintage_date == Date::parse("2005-01-15"));
  CHECK(d.vintages.front().vintage_date == Date::parse("2004-04-15"));
  // quarterly rows only at quarter ends, dated by the quarter's first month
  for (Index t = 0; t < 60; ++t) CHECK(std::isnan(d.observations(t, 0)) == (t % 3 != 2));
  const auto& gdp = d.vintages.back().at("gdp");
  CHECK(gdp.size() == 20);
  CHECK(gdp.front().reference == Date::parse("2000-01-01"));
  CHECK(gdp.front().value == d.observations(2, 0));
  // unrevised vintages are prefixes of the final one
  const auto& early = d.vintages.front().at("unemp");
  CHECK(early.size() == 51);
  for (std::size_t i = 0; i < early.size(); ++i) CHECK(early[i].value == d.vintages.back().at("unemp")[i].value);
  // the same seed reproduces the same data
  const auto again = simulate_dataset(model, sc);
  CHECK((again.states - d.states).cwiseAbs().maxCoeff() == 0.0);

  const auto dir = scratch("dataset");
  write_dataset(dir.string(), model, d);
  for (const char* f : {"calendar.csv", "config.json", "truth_states.csv", "truth_parameters.json"})
    CHECK(fs::exists(dir / f));
  const auto store = VintageStore::open((dir / "calendar.csv").string());
  CHECK(store.snapshot(Date::parse("2004-12-31")).at("unemp").size() == 57);
  const auto cfg = RunConfig::load((dir / "config.json").string());
  CHECK(cfg.data.series.size() == 3);
}

TEST_CASE("estimating one vintage writes draws, states and components") {
  ModelConfig mc;
  mc.variables = {Variable::gdp, Variable::unemp};
  const TrendCycleModel model(mc);
  SyntheticConfig sc;
  sc.start_month = parse_month("2000-01");
  sc.n_months = 96;
  sc.seed = 5;
  const auto dir = scratch("estimate");
  const auto d = simulate_dataset(model, sc);
  write_dataset(dir.string(), model, d);
  auto cfg = RunConfig::load((dir / "config.json").string());
  cfg.model = mc;
  cfg.sampler.n_iter = 60;
  cfg.sampler.burn_in = 30;
  cfg.sampler.state_thin = 5;
  const auto store = VintageStore::open(cfg.resolve(cfg.calendar));
  const auto r = estimate_vintage(cfg, model, store, d.vintages.back().vintage_date);
  CHECK(r.panel.n_time() == 97);
  CHECK(r.draws.n_retained() == 30);
  CHECK(r.draws.states.size() == 6);
  REQUIRE(r.gap_pct.size() == 97);
  for (Index t = 0; t < 97; ++t) {
    CHECK(r.gap_p05(t) <= r.gap_p95(t));
    CHECK(std::isfinite(r.gap_pct(t)));
  }

  const auto out = dir / "est";
  write_estimate(out.string(), model, r);
  const auto draws = read_draws_csv((out / "draws.csv").string());
  CHECK(draws.names.size() == model.parameters().size());
  CHECK(draws.values.rows() == 30);
  CHECK((draws.values - r.draws.params).cwiseAbs().maxCoeff() == 0.0);
  const auto states = read_state_archive((out / "states.bin").string());
  REQUIRE(states.states.size() == 6);
  CHECK((states.states[2] - r.draws.states[2]).cwiseAbs().maxCoeff() == 0.0);
  CHECK(states.sweeps == r.draws.state_sweeps);
  for (const char* f : {"components.csv", "gap.csv", "summary.json"}) CHECK(fs::exists(out / f));
}

TEST_CASE("the shipped default configuration loads") {
  const auto c = RunConfig::load(std::string(RTGAP_SOURCE_DIR) + "/config/default.json");
  CHECK(c.model.variables.size() == 8);
  CHECK(c.data.series.size() == 9);
  CHECK(c.sampler.n_iter == 10000);
  CHECK(c.sampler.burn_in == 5000);
  CHECK(c.backtest.horizons.size() == 36);
  CHECK(c.estimation_start() == parse_month("1985-01"));
  ModelConfig tracking = c.model;
  tracking.kind = SpecKind::tracking;
  CHECK(TrendCycleModel(c.model).parameters().size() == 65);
  CHECK(TrendCycleModel(tracking).observables().size() == 9);
}
