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

#include "rtgap/rtgap.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "rtgap/backtest.hpp"
#include "rtgap/config.hpp"
#include "rtgap/errors.hpp"
#include "rtgap/pipeline.hpp"

struct rtgap_config {
  rtgap::RunConfig config;
};

struct rtgap_model {
  std::unique_ptr<rtgap::TrendCycleModel> model;
  std::vector<std::string> obs_names;
};

namespace {

thread_local std::string g_last_error;
thread_local int64_t g_last_time = -1;

rtgap_status fail(rtgap_status s, const std::string& what, int64_t time = -1) {
  g_last_error = what;
  g_last_time = time;
  return s;
}

template <class F>
rtgap_status guarded(F&& f) {
  g_last_error.clear();
  g_last_time = -1;
  try {
    f();
    return RTGAP_OK;
  } catch (const rtgap::ValidationError& e) {
    return fail(RTGAP_ERR_VALIDATION, e.what());
  } catch (const rtgap::NumericalError& e) {
    return fail(RTGAP_ERR_NUMERICAL, e.what(), e.time_index());
  } catch (const rtgap::IoError& e) {
    return fail(RTGAP_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RTGAP_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(RTGAP_ERROR, e.what());
  } catch (...) {
    return fail(RTGAP_ERROR, "unknown failure");
  }
}

#define RTGAP_REQUIRE(ptr)                                                   \
  do {                                                                       \
    if ((ptr) == nullptr) return fail(RTGAP_ERR_ARGUMENT, #ptr " is null"); \
  } while (0)

rtgap::Matrix read_rows(const double* y, size_t n_time, size_t n_obs) {
  rtgap::Matrix m(static_cast<rtgap::Index>(n_time), static_cast<rtgap::Index>(n_obs));
  for (size_t t = 0; t < n_time; ++t)
    for (size_t j = 0; j < n_obs; ++j) m(static_cast<rtgap::Index>(t), static_cast<rtgap::Index>(j)) = y[t * n_obs + j];
  return m;
}

void write_rows(const rtgap::Matrix& m, double* out) {
  for (rtgap::Index t = 0; t < m.rows(); ++t)
    for (rtgap::Index j = 0; j < m.cols(); ++j) out[t * m.cols() + j] = m(t, j);
}

rtgap::Vector read_params(const rtgap_model* m, const double* params) {
  const auto n = static_cast<rtgap::Index>(m->model->parameters().size());
  return Eigen::Map<const rtgap::Vector>(params, n);
}

}  // namespace

extern "C" {

const char* rtgap_version(void) { return "0.1.0"; }

const char* rtgap_last_error(void) { return g_last_error.c_str(); }

int64_t rtgap_last_error_time_index(void) { return g_last_time; }

rtgap_status rtgap_config_load(const char* path, rtgap_config** out) {
  RTGAP_REQUIRE(path);
  RTGAP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new rtgap_config{rtgap::RunConfig::load(path)}; });
}

rtgap_status rtgap_config_parse(const char* json, const char* base_dir, rtgap_config** out) {
  RTGAP_REQUIRE(json);
  RTGAP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      throw rtgap::ValidationError(std::string("config: ") + e.what());
    }
    *out = new rtgap_config{rtgap::RunConfig::from_json(j, base_dir ? base_dir : "")};
  });
}

void rtgap_config_free(rtgap_config* config) { delete config; }

rtgap_status rtgap_config_set_sweeps(rtgap_config* config, int n_iter, int burn_in) {
  RTGAP_REQUIRE(config);
  return guarded([&] {
    rtgap::SamplerConfig s = config->config.sampler;
    s.n_iter = n_iter;
    s.burn_in = burn_in;
    s.validate();
    config->config.sampler = s;
  });
}

rtgap_status rtgap_config_set_seed(rtgap_config* config, uint64_t seed) {
  RTGAP_REQUIRE(config);
  config->config.sampler.seed = seed;
  config->config.synthetic.seed = seed;
  return RTGAP_OK;
}

rtgap_status rtgap_config_dump(const rtgap_config* config, char* buf, size_t size, size_t* needed) {
  RTGAP_REQUIRE(config);
  return guarded([&] {
    const std::string s = config->config.to_json().dump(2);
    if (needed) *needed = s.size() + 1;
    if (buf != nullptr && size > 0) {
      const size_t n = std::min(size - 1, s.size());
      std::memcpy(buf, s.data(), n);
      buf[n] = '\0';
    }
  });
}

rtgap_status rtgap_run_estimate(const rtgap_config* config, const char* spec, const char* vintage,
                                const char* out_dir) {
  RTGAP_REQUIRE(config);
  RTGAP_REQUIRE(spec);
  RTGAP_REQUIRE(vintage);
  return guarded([&] {
    const auto& c = config->config;
    if (c.calendar.empty()) throw rtgap::ValidationError("config names no release calendar");
    rtgap::ModelConfig mc = c.model;
    mc.kind = rtgap::spec_from_string(spec);
    const rtgap::TrendCycleModel model(mc);
    const auto store = rtgap::VintageStore::open(c.resolve(c.calendar));
    const auto result = rtgap::estimate_vintage(c, model, store, rtgap::Date::parse(vintage));
    rtgap::write_estimate(out_dir ? out_dir : c.resolve(c.output), model, result);
  });
}

rtgap_status rtgap_run_backtest(const rtgap_config* config, const char* out_dir) {
  RTGAP_REQUIRE(config);
  return guarded([&] {
    const auto& c = config->config;
    if (c.calendar.empty()) throw rtgap::ValidationError("config names no release calendar");
    const auto store = rtgap::VintageStore::open(c.resolve(c.calendar));
    rtgap::BacktestInputs in;
    in.store = &store;
    in.data = c.data;
    in.model = c.model;
    in.sampler = c.sampler;
    in.backtest = c.backtest;
    const auto out = rtgap::run_backtest(in);
    const std::string dir = out_dir ? out_dir : c.resolve(c.output);
    rtgap::write_backtest(dir, out);
    std::ofstream os(std::filesystem::path(dir) / "settings.json");
    os << c.to_json().dump(2) << '\n';
    if (!os) throw rtgap::IoError("write failed for " + dir + "/settings.json");
  });
}

rtgap_status rtgap_run_report(const char* input_dir, const char* format, const char* out_dir,
                              const char* cutoff) {
  RTGAP_REQUIRE(input_dir);
  RTGAP_REQUIRE(format);
  return guarded([&] {
    const std::string f = format;
    rtgap::ReportFormat fmt;
    if (f == "csv") fmt = rtgap::ReportFormat::csv;
    else if (f == "json") fmt = rtgap::ReportFormat::json;
    else throw rtgap::ValidationError("unknown report format '" + f + "'");
    std::optional<int> cut;
    if (cutoff != nullptr && *cutoff != '\0') {
      cut = rtgap::parse_month(cutoff);
    } else {
      const auto settings = std::filesystem::path(input_dir) / "settings.json";
      if (std::filesystem::exists(settings)) {
        const auto c = rtgap::RunConfig::load(settings.string());
        if (c.backtest.revision_cutoff) cut = c.backtest.revision_cutoff->month_index();
      }
    }
    const auto out = rtgap::read_backtest(input_dir);
    rtgap::write_report(out_dir ? out_dir : input_dir, rtgap::make_report(out, cut), fmt);
  });
}

rtgap_status rtgap_run_simulate(const rtgap_config* config, const char* out_dir) {
  RTGAP_REQUIRE(config);
  return guarded([&] {
    const auto& c = config->config;
    const rtgap::TrendCycleModel model(c.model);
    const auto data = rtgap::simulate_dataset(model, c.synthetic);
    rtgap::write_dataset(out_dir ? out_dir : c.resolve(c.output), model, data);
  });
}

rtgap_status rtgap_model_create(const rtgap_config* config, const char* spec, rtgap_model** out) {
  RTGAP_REQUIRE(config);
  RTGAP_REQUIRE(spec);
  RTGAP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    rtgap::ModelConfig mc = config->config.model;
    mc.kind = rtgap::spec_from_string(spec);
    auto m = std::make_unique<rtgap_model>();
    m->model = std::make_unique<rtgap::TrendCycleModel>(mc);
    for (auto v : m->model->observables()) m->obs_names.emplace_back(rtgap::to_string(v));
    *out = m.release();
  });
}

void rtgap_model_free(rtgap_model* model) { delete model; }

size_t rtgap_model_n_params(const rtgap_model* m) { return m ? m->model->parameters().size() : 0; }

size_t rtgap_model_n_states(const rtgap_model* m) {
  return m ? static_cast<size_t>(m->model->n_state()) : 0;
}

size_t rtgap_model_n_obs(const rtgap_model* m) { return m ? m->obs_names.size() : 0; }

const char* rtgap_model_param_name(const rtgap_model* m, size_t i) {
  if (m == nullptr || i >= m->model->parameters().size()) return nullptr;
  return m->model->parameters()[i].name.c_str();
}

const char* rtgap_model_state_name(const rtgap_model* m, size_t i) {
  if (m == nullptr || i >= m->model->state_names().size()) return nullptr;
  return m->model->state_names()[i].c_str();
}

const char* rtgap_model_obs_name(const rtgap_model* m, size_t i) {
  if (m == nullptr || i >= m->obs_names.size()) return nullptr;
  return m->obs_names[i].c_str();
}

rtgap_status rtgap_model_prior_medians(const rtgap_model* m, double* params) {
  RTGAP_REQUIRE(m);
  RTGAP_REQUIRE(params);
  return guarded([&] {
    const rtgap::Vector p = rtgap::prior_medians(m->model->parameters());
    std::copy(p.data(), p.data() + p.size(), params);
  });
}

rtgap_status rtgap_model_loglik(const rtgap_model* m, const double* params, const double* y,
                                size_t n_time, double* loglik) {
  RTGAP_REQUIRE(m);
  RTGAP_REQUIRE(params);
  RTGAP_REQUIRE(y);
  RTGAP_REQUIRE(loglik);
  return guarded([&] {
    const auto sys = m->model->build_system(read_params(m, params));
    *loglik = rtgap::loglikelihood(sys, read_rows(y, n_time, m->obs_names.size()));
  });
}

rtgap_status rtgap_model_smooth(const rtgap_model* m, const double* params, const double* y,
                                size_t n_time, double* states) {
  RTGAP_REQUIRE(m);
  RTGAP_REQUIRE(params);
  RTGAP_REQUIRE(y);
  RTGAP_REQUIRE(states);
  return guarded([&] {
    const auto sys = m->model->build_system(read_params(m, params));
    write_rows(rtgap::smooth_mean(sys, read_rows(y, n_time, m->obs_names.size())), states);
  });
}

rtgap_status rtgap_model_simulate(const rtgap_model* m, const double* params, size_t n_time,
                                  uint64_t seed, double* y, double* states) {
  RTGAP_REQUIRE(m);
  RTGAP_REQUIRE(params);
  RTGAP_REQUIRE(y);
  return guarded([&] {
    const auto sys = m->model->build_system(read_params(m, params));
    std::mt19937_64 rng(seed);
    const auto path = rtgap::simulate_system(sys, rtgap::synthetic_start(*m->model),
                                             static_cast<rtgap::Index>(n_time), rng);
    rtgap::Matrix obs = path.observations;
    for (rtgap::Index r = 0; r < obs.cols(); ++r)
      if (rtgap::is_quarterly(m->model->observables()[static_cast<std::size_t>(r)]))
        for (rtgap::Index t = 0; t < obs.rows(); ++t)
          if (t % 3 != 2) obs(t, r) = std::numeric_limits<double>::quiet_NaN();
    write_rows(obs, y);
    if (states != nullptr) write_rows(path.states, states);
  });
}

double rtgap_adapt_sigma(double sigma_prev, double alpha_prev, int sweep) {
  return rtgap::adapt_sigma(sigma_prev, alpha_prev, sweep);
}

}  // extern "C"
