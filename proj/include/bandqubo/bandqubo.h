/*
 Copyright 2026 The bandqubo Authors
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

/*
 * C interface to libbandqubo.
 *
 * Every object is an opaque handle created by a bq_*_create / bq_*_load /
 * bq_*_build function and released with the matching bq_*_free. Functions
 * that can fail return a bq_status; on failure bq_last_error() describes the
 * problem for the calling thread until its next failing call. Output
 * handles are left untouched on failure.
 *
 * Arrays are caller-owned. Matrices are dense row-major. Bit vectors are one
 * byte per bit (0 or 1).
 */

#ifndef BANDQUBO_H
#define BANDQUBO_H

#include <stddef.h>
#include <stdint.h>

#if defined(BANDQUBO_BUILDING)
#define BQ_API __attribute__((visibility("default")))
#else
#define BQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bq_status {
    BQ_OK = 0,
    BQ_ERR_INVALID_ARGUMENT = 1,
    BQ_ERR_IO = 2,
    BQ_ERR_PARSE = 3,
    BQ_ERR_VALIDATION = 4,
    BQ_ERR_INSUFFICIENT_DATA = 5,
    BQ_ERR_INFEASIBLE = 6,
    BQ_ERR_ENCODING = 7,
    BQ_ERR_DIMENSION = 8,
    BQ_ERR_SOLVER_REFUSED = 9,
    BQ_ERR_BUILD = 10,
    BQ_ERR_INTERNAL = 11
} bq_status;

typedef struct bq_market bq_market;
typedef struct bq_bands bq_bands;
typedef struct bq_encoding bq_encoding;
typedef struct bq_qubo bq_qubo;
typedef struct bq_solution bq_solution;
typedef struct bq_run bq_run;

/* Cost function H(w) = -mu.w + gamma/2 w'Sw + rho (sum w - 1)^2
 *                      + lambda_vol (k'Sw - sigma_target^2)^2  (if vol_constraint).
 * k_weights may be NULL for the uniform 1/N vector. */
typedef struct bq_model {
    double gamma;
    double rho;
    double lambda_vol;
    double sigma_target;
    const double* k_weights;
    int vol_constraint;
} bq_model;

typedef struct bq_schedule {
    double t_start;
    double t_end;
    uint64_t sweeps;
    uint64_t replicas;
    uint64_t seed;
} bq_schedule;

typedef struct bq_portfolio_metrics {
    double expected_return;
    double volatility;
    double budget_residual;
    double vol_gap;
    int band_ok;
} bq_portfolio_metrics;

BQ_API const char* bq_version(void);
BQ_API const char* bq_last_error(void);
BQ_API const char* bq_status_string(bq_status status);

/* Market inputs. as_of is a price-row index (-1 for the last row);
 * periods_per_year > 0 annualizes, 0 keeps daily units. */
BQ_API bq_status bq_market_from_csv(const char* path, size_t window, int64_t as_of, int periods_per_year,
                                    bq_market** out);
BQ_API bq_status bq_market_create(size_t num_assets, const double* mu, const double* sigma, int yearly,
                                  bq_market** out);
BQ_API bq_status bq_market_annualize(const bq_market* market, int periods_per_year, bq_market** out);
BQ_API size_t bq_market_num_assets(const bq_market* market);
BQ_API int bq_market_is_yearly(const bq_market* market);
BQ_API bq_status bq_market_mu(const bq_market* market, double* out, size_t len);
BQ_API bq_status bq_market_sigma(const bq_market* market, double* out, size_t len);
BQ_API void bq_market_free(bq_market* market);

/* Investment bands and their bit encoding. forced_depth < 0 picks the
 * largest depth that fits each band. */
BQ_API bq_status bq_bands_create(size_t num_assets, const double* w_min, const double* w_max, bq_bands** out);
BQ_API int bq_bands_feasible(const bq_bands* bands);
BQ_API void bq_bands_free(bq_bands* bands);

BQ_API bq_status bq_encoding_create(const bq_bands* bands, int units, int forced_depth, bq_encoding** out);
BQ_API size_t bq_encoding_total_bits(const bq_encoding* encoding);
BQ_API bq_status bq_encoding_asset(const bq_encoding* encoding, size_t asset, int* depth, int64_t* residual,
                                   size_t* bit_offset);
BQ_API void bq_encoding_free(bq_encoding* encoding);

BQ_API bq_status bq_decode(const bq_encoding* encoding, const bq_bands* bands, const uint8_t* bits, size_t num_bits,
                           double* weights, size_t num_assets);
BQ_API bq_status bq_encode_nearest(const bq_encoding* encoding, const bq_bands* bands, const double* weights,
                                   size_t num_assets, uint8_t* bits, size_t num_bits);

/* Cost function and QUBO. */
BQ_API bq_status bq_cost_direct(const bq_market* market, const bq_model* model, const double* weights,
                                size_t num_assets, double* out);
BQ_API bq_status bq_qubo_build(const bq_market* market, const bq_model* model, const bq_encoding* encoding,
                               const bq_bands* bands, bq_qubo** out);
BQ_API size_t bq_qubo_num_bits(const bq_qubo* qubo);
BQ_API double bq_qubo_offset(const bq_qubo* qubo);
BQ_API bq_status bq_qubo_coefficient(const bq_qubo* qubo, size_t i, size_t j, double* out);
BQ_API bq_status bq_qubo_energy(const bq_qubo* qubo, const uint8_t* bits, size_t num_bits, double* out);
BQ_API bq_status bq_qubo_write(const bq_qubo* qubo, const char* path);
BQ_API bq_status bq_qubo_read(const char* path, bq_qubo** out);
BQ_API void bq_qubo_free(bq_qubo* qubo);

/* Solvers. A NULL schedule uses the default schedule with seed 0;
 * threads = 0 uses the hardware concurrency. */
BQ_API bq_status bq_default_schedule(const bq_qubo* qubo, uint64_t seed, bq_schedule* out);
BQ_API bq_status bq_anneal(const bq_qubo* qubo, const bq_schedule* schedule, size_t threads, bq_solution** out);
BQ_API bq_status bq_exhaustive(const bq_qubo* qubo, size_t bit_cap, bq_solution** out);
BQ_API size_t bq_solution_num_bits(const bq_solution* solution);
BQ_API bq_status bq_solution_bits(const bq_solution* solution, uint8_t* out, size_t len);
BQ_API double bq_solution_energy(const bq_solution* solution);
BQ_API void bq_solution_provenance(const bq_solution* solution, size_t* replica, size_t* sweep);
BQ_API void bq_solution_free(bq_solution* solution);

BQ_API bq_status bq_evaluate(const bq_market* market, const bq_model* model, const bq_bands* bands,
                             const double* weights, size_t num_assets, bq_portfolio_metrics* out);

/* Whole runs driven by a config file, as used by the command-line tool.
 * experiment is one of "solve", "sweep", "frontier", "cloud". */
BQ_API bq_status bq_run_load(const char* config_path, bq_run** out);
BQ_API bq_status bq_run_set_seed(bq_run* run, uint64_t seed);
BQ_API bq_status bq_run_set_output_dir(bq_run* run, const char* dir);
BQ_API bq_status bq_run_execute(bq_run* run, const char* experiment);
BQ_API void bq_run_free(bq_run* run);

/* Diagnostics for a config file. Never fails on problems in the config;
 * *report receives a text report to release with bq_string_free. */
BQ_API bq_status bq_validate_config(const char* config_path, char** report, size_t* error_count);
BQ_API void bq_string_free(char* str);

#ifdef __cplusplus
}
#endif

#endif /* BANDQUBO_H */
