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

#ifndef RTGAP_RTGAP_H_
#define RTGAP_RTGAP_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(RTGAP_BUILDING_LIBRARY)
#define RTGAP_API __attribute__((visibility("default")))
#else
#define RTGAP_API
#endif

typedef enum rtgap_status {
  RTGAP_OK = 0,
  RTGAP_ERROR = 1,             /* internal or unclassified failure */
  RTGAP_ERR_VALIDATION = 2,    /* bad input, config or parameter */
  RTGAP_ERR_NUMERICAL = 3,     /* numerical failure */
  RTGAP_ERR_IO = 4,            /* unreadable or unwritable file */
  RTGAP_ERR_ARGUMENT = 5       /* null handle or pointer */
} rtgap_status;

typedef struct rtgap_config rtgap_config;
typedef struct rtgap_model rtgap_model;

RTGAP_API const char* rtgap_version(void);

/* Message of the last failure on the calling thread ("" if none). */
RTGAP_API const char* rtgap_last_error(void);
/* Time index attached to the last numerical failure, or -1. */
RTGAP_API int64_t rtgap_last_error_time_index(void);

RTGAP_API rtgap_status rtgap_config_load(const char* path, rtgap_config** out);
/* base_dir may be NULL; relative paths then resolve against the cwd. */
RTGAP_API rtgap_status rtgap_config_parse(const char* json, const char* base_dir,
                                          rtgap_config** out);
RTGAP_API void rtgap_config_free(rtgap_config* config);
RTGAP_API rtgap_status rtgap_config_set_sweeps(rtgap_config* config, int n_iter, int burn_in);
RTGAP_API rtgap_status rtgap_config_set_seed(rtgap_config* config, uint64_t seed);
/* Writes the effective configuration as JSON into buf (NUL-terminated).
   *needed receives the full size including the terminator. */
RTGAP_API rtgap_status rtgap_config_dump(const rtgap_config* config, char* buf, size_t size,
                                         size_t* needed);

/* spec is "undisciplined" or "tracking"; vintage is YYYY-MM-DD. */
RTGAP_API rtgap_status rtgap_run_estimate(const rtgap_config* config, const char* spec,
                                          const char* vintage, const char* out_dir);
RTGAP_API rtgap_status rtgap_run_backtest(const rtgap_config* config, const char* out_dir);
/* format is "csv" or "json"; cutoff (YYYY-MM) may be NULL. */
RTGAP_API rtgap_status rtgap_run_report(const char* input_dir, const char* format,
                                        const char* out_dir, const char* cutoff);
RTGAP_API rtgap_status rtgap_run_simulate(const rtgap_config* config, const char* out_dir);

/* Model handle for direct likelihood, smoothing and simulation. Matrices
   are row-major with time along rows; NaN marks a missing observation. */
RTGAP_API rtgap_status rtgap_model_create(const rtgap_config* config, const char* spec,
                                          rtgap_model** out);
RTGAP_API void rtgap_model_free(rtgap_model* model);
RTGAP_API size_t rtgap_model_n_params(const rtgap_model* model);
RTGAP_API size_t rtgap_model_n_states(const rtgap_model* model);
RTGAP_API size_t rtgap_model_n_obs(const rtgap_model* model);
RTGAP_API const char* rtgap_model_param_name(const rtgap_model* model, size_t i);
RTGAP_API const char* rtgap_model_state_name(const rtgap_model* model, size_t i);
RTGAP_API const char* rtgap_model_obs_name(const rtgap_model* model, size_t i);
RTGAP_API rtgap_status rtgap_model_prior_medians(const rtgap_model* model, double* params);
RTGAP_API rtgap_status rtgap_model_loglik(const rtgap_model* model, const double* params,
                                          const double* y, size_t n_time, double* loglik);
RTGAP_API rtgap_status rtgap_model_smooth(const rtgap_model* model, const double* params,
                                          const double* y, size_t n_time, double* states);
/* Quarterly rows of y are NaN except in quarter-end months (t % 3 == 2). states may be NULL. */
RTGAP_API rtgap_status rtgap_model_simulate(const rtgap_model* model, const double* params,
                                            size_t n_time, uint64_t seed, double* y,
                                            double* states);

RTGAP_API double rtgap_adapt_sigma(double sigma_prev, double alpha_prev, int sweep);

#ifdef __cplusplus
}
#endif

#endif  /* RTGAP_RTGAP_H_ */
