// Copyright 2026 The bandqubo Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "bandqubo/bandqubo.h"

#include <cstring>
#include <fstream>
#include <exception>
#include <new>
#include <string>

#include "bandqubo/config.hpp"
#include "bandqubo/encoding.hpp"
#include "bandqubo/error.hpp"
#include "bandqubo/evaluator.hpp"
#include "bandqubo/experiments.hpp"
#include "bandqubo/market_data.hpp"
#include "bandqubo/qubo.hpp"
#include "bandqubo/solver.hpp"

struct bq_market {
    bandqubo::MarketInputs value;
};
struct bq_bands {
    bandqubo::BandSpec value;
};
struct bq_encoding {
    bandqubo::EncodingSpec value;
};
struct bq_qubo {
    bandqubo::Qubo value;
};
struct bq_solution {
    bandqubo::Solution value;
};
struct bq_run {
    bandqubo::RunConfig value;
};

namespace {

thread_local std::string last_error;

bq_status status_of(bandqubo::ErrorKind kind) {
    using bandqubo::ErrorKind;
    switch (kind) {
        case ErrorKind::InvalidArgument: return BQ_ERR_INVALID_ARGUMENT;
        case ErrorKind::Io: return BQ_ERR_IO;
        case ErrorKind::Parse: return BQ_ERR_PARSE;
        case ErrorKind::Validation: return BQ_ERR_VALIDATION;
        case ErrorKind::InsufficientData: return BQ_ERR_INSUFFICIENT_DATA;
        case ErrorKind::Infeasible: return BQ_ERR_INFEASIBLE;
        case ErrorKind::Encoding: return BQ_ERR_ENCODING;
        case ErrorKind::Dimension: return BQ_ERR_DIMENSION;
        case ErrorKind::SolverRefused: return BQ_ERR_SOLVER_REFUSED;
        case ErrorKind::Build: return BQ_ERR_BUILD;
    }
    return BQ_ERR_INTERNAL;
}

bq_status set_error(bq_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

/// Runs `body`, translating exceptions into status codes.
template <typename F>
bq_status guarded(F&& body) {
    try {
        body();
        return BQ_OK;
    } catch (const bandqubo::Error& e) {
        return set_error(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(BQ_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(BQ_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(BQ_ERR_INTERNAL, "unknown error");
    }
}

#define BQ_REQUIRE(cond)                                                            \
    do {                                                                            \
        if (!(cond)) return set_error(BQ_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
    } while (0)

bandqubo::ModelConfig to_model(const bq_model& m, std::size_t num_assets) {
    bandqubo::ModelConfig cfg;
    cfg.gamma = m.gamma;
    cfg.rho = m.rho;
    cfg.lambda_vol = m.lambda_vol;
    cfg.sigma_target = m.sigma_target;
    cfg.vol_constraint = m.vol_constraint != 0;
    if (cfg.vol_constraint) {
        if (m.k_weights) {
            cfg.k_weights = Eigen::Map<const bandqubo::Vector>(m.k_weights, static_cast<Eigen::Index>(num_assets));
        } else {
            cfg.k_weights = bandqubo::default_linear_weights(num_assets);
        }
    }
    return cfg;
}

bandqubo::Vector to_vector(const double* data, std::size_t n) {
    return Eigen::Map<const bandqubo::Vector>(data, static_cast<Eigen::Index>(n));
}

}  // namespace

extern "C" {

BQ_API const char* bq_version(void) { return "1.0.0"; }

BQ_API const char* bq_last_error(void) { return last_error.c_str(); }

BQ_API const char* bq_status_string(bq_status status) {
    switch (status) {
        case BQ_OK: return "ok";
        case BQ_ERR_INVALID_ARGUMENT: return "invalid argument";
        case BQ_ERR_IO: return "io error";
        case BQ_ERR_PARSE: return "parse error";
        case BQ_ERR_VALIDATION: return "validation error";
        case BQ_ERR_INSUFFICIENT_DATA: return "insufficient data";
        case BQ_ERR_INFEASIBLE: return "infeasible";
        case BQ_ERR_ENCODING: return "encoding error";
        case BQ_ERR_DIMENSION: return "dimension mismatch";
        case BQ_ERR_SOLVER_REFUSED: return "solver refused";
        case BQ_ERR_BUILD: return "build error";
        case BQ_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

BQ_API bq_status bq_market_from_csv(const char* path, size_t window, int64_t as_of, int periods_per_year,
                                    bq_market** out) {
    BQ_REQUIRE(path && out);
    return guarded([&] {
        const auto series = bandqubo::load_prices(path);
        const std::size_t row = as_of < 0 ? series.num_dates() - 1 : static_cast<std::size_t>(as_of);
        if (row >= series.num_dates()) {
            bandqubo::fail(bandqubo::ErrorKind::InvalidArgument, "as_of index beyond the last price row");
        }
        auto inputs = bandqubo::estimate_inputs(bandqubo::log_returns(series), window, row);
        if (periods_per_year > 0) inputs = bandqubo::annualize(inputs, periods_per_year);
        *out = new bq_market{std::move(inputs)};
    });
}

BQ_API bq_status bq_market_create(size_t num_assets, const double* mu, const double* sigma, int yearly,
                                  bq_market** out) {
    BQ_REQUIRE(mu && sigma && out);
    return guarded([&] {
        const auto n = static_cast<Eigen::Index>(num_assets);
        bandqubo::Matrix s = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            sigma, n, n);
        *out = new bq_market{bandqubo::MarketInputs(to_vector(mu, num_assets), std::move(s),
                                                    yearly ? bandqubo::Period::Yearly : bandqubo::Period::Daily)};
    });
}

BQ_API bq_status bq_market_annualize(const bq_market* market, int periods_per_year, bq_market** out) {
    BQ_REQUIRE(market && out);
    return guarded([&] { *out = new bq_market{bandqubo::annualize(market->value, periods_per_year)}; });
}

BQ_API size_t bq_market_num_assets(const bq_market* market) { return market ? market->value.num_assets() : 0; }

BQ_API int bq_market_is_yearly(const bq_market* market) {
    return market && market->value.period() == bandqubo::Period::Yearly;
}

BQ_API bq_status bq_market_mu(const bq_market* market, double* out, size_t len) {
    BQ_REQUIRE(market && out);
    const auto n = market->value.num_assets();
    if (len < n) return set_error(BQ_ERR_DIMENSION, "output buffer too small for mu");
    for (std::size_t i = 0; i < n; ++i) out[i] = market->value.mu()[static_cast<Eigen::Index>(i)];
    return BQ_OK;
}

BQ_API bq_status bq_market_sigma(const bq_market* market, double* out, size_t len) {
    BQ_REQUIRE(market && out);
    const auto n = market->value.num_assets();
    if (len < n * n) return set_error(BQ_ERR_DIMENSION, "output buffer too small for the covariance");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out[i * n + j] = market->value.sigma()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return BQ_OK;
}

BQ_API void bq_market_free(bq_market* market) { delete market; }

BQ_API bq_status bq_bands_create(size_t num_assets, const double* w_min, const double* w_max, bq_bands** out) {
    BQ_REQUIRE(w_min && w_max && out);
    return guarded([&] {
        std::vector<bandqubo::AssetBand> bands;
        bands.reserve(num_assets);
        for (std::size_t i = 0; i < num_assets; ++i) bands.push_back({std::to_string(i), w_min[i], w_max[i], {}});
        *out = new bq_bands{bandqubo::BandSpec(std::move(bands))};
    });
}

BQ_API int bq_bands_feasible(const bq_bands* bands) { return bands && bands->value.budget_feasible(); }

BQ_API void bq_bands_free(bq_bands* bands) { delete bands; }

BQ_API bq_status bq_encoding_create(const bq_bands* bands, int units, int forced_depth, bq_encoding** out) {
    BQ_REQUIRE(bands && out);
    return guarded([&] {
        std::optional<int> depth;
        if (forced_depth >= 0) depth = forced_depth;
        *out = new bq_encoding{bandqubo::make_encoding(bands->value, units, bandqubo::GridMode::Integral, depth)};
    });
}

BQ_API size_t bq_encoding_total_bits(const bq_encoding* encoding) {
    return encoding ? encoding->value.total_bits() : 0;
}

BQ_API bq_status bq_encoding_asset(const bq_encoding* encoding, size_t asset, int* depth, int64_t* residual,
                                   size_t* bit_offset) {
    BQ_REQUIRE(encoding);
    if (asset >= encoding->value.num_assets()) return set_error(BQ_ERR_INVALID_ARGUMENT, "asset index out of range");
    const auto& a = encoding->value.asset(asset);
    if (depth) *depth = a.depth;
    if (residual) *residual = a.residual;
    if (bit_offset) *bit_offset = a.bit_offset;
    return BQ_OK;
}

BQ_API void bq_encoding_free(bq_encoding* encoding) { delete encoding; }

BQ_API bq_status bq_decode(const bq_encoding* encoding, const bq_bands* bands, const uint8_t* bits, size_t num_bits,
                           double* weights, size_t num_assets) {
    BQ_REQUIRE(encoding && bands && weights && (bits || num_bits == 0));
    return guarded([&] {
        if (num_assets < encoding->value.num_assets()) {
            bandqubo::fail(bandqubo::ErrorKind::Dimension, "output buffer too small for the weights");
        }
        const auto w = bandqubo::decode(bandqubo::BitsView(bits, num_bits), encoding->value, bands->value);
        for (Eigen::Index i = 0; i < w.size(); ++i) weights[i] = w[i];
    });
}

BQ_API bq_status bq_encode_nearest(const bq_encoding* encoding, const bq_bands* bands, const double* weights,
                                   size_t num_assets, uint8_t* bits, size_t num_bits) {
    BQ_REQUIRE(encoding && bands && weights && (bits || num_bits == 0));
    return guarded([&] {
        if (num_bits < encoding->value.total_bits()) {
            bandqubo::fail(bandqubo::ErrorKind::Dimension, "output buffer too small for the bits");
        }
        const auto b = bandqubo::encode_nearest(to_vector(weights, num_assets), encoding->value, bands->value);
        std::copy(b.begin(), b.end(), bits);
    });
}

BQ_API bq_status bq_cost_direct(const bq_market* market, const bq_model* model, const double* weights,
                                size_t num_assets, double* out) {
    BQ_REQUIRE(market && model && weights && out);
    return guarded([&] {
        *out = bandqubo::cost_direct(to_vector(weights, num_assets), market->value,
                                     to_model(*model, market->value.num_assets()));
    });
}

BQ_API bq_status bq_qubo_build(const bq_market* market, const bq_model* model, const bq_encoding* encoding,
                               const bq_bands* bands, bq_qubo** out) {
    BQ_REQUIRE(market && model && encoding && bands && out);
    return guarded([&] {
        *out = new bq_qubo{bandqubo::build_qubo(market->value, to_model(*model, market->value.num_assets()),
                                                encoding->value, bands->value)};
    });
}

BQ_API size_t bq_qubo_num_bits(const bq_qubo* qubo) { return qubo ? qubo->value.num_bits() : 0; }

BQ_API double bq_qubo_offset(const bq_qubo* qubo) { return qubo ? qubo->value.offset() : 0.0; }

BQ_API bq_status bq_qubo_coefficient(const bq_qubo* qubo, size_t i, size_t j, double* out) {
    BQ_REQUIRE(qubo && out);
    const auto b = qubo->value.num_bits();
    if (i >= b || j >= b) return set_error(BQ_ERR_INVALID_ARGUMENT, "QUBO index out of range");
    *out = qubo->value.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return BQ_OK;
}

BQ_API bq_status bq_qubo_energy(const bq_qubo* qubo, const uint8_t* bits, size_t num_bits, double* out) {
    BQ_REQUIRE(qubo && out && (bits || num_bits == 0));
    return guarded([&] { *out = qubo->value.energy(bandqubo::BitsView(bits, num_bits)); });
}

BQ_API bq_status bq_qubo_write(const bq_qubo* qubo, const char* path) {
    BQ_REQUIRE(qubo && path);
    return guarded([&] { bandqubo::write_qubo(std::filesystem::path(path), qubo->value); });
}

BQ_API bq_status bq_qubo_read(const char* path, bq_qubo** out) {
    BQ_REQUIRE(path && out);
    return guarded([&] {
        std::ifstream in(path);
        if (!in) bandqubo::fail(bandqubo::ErrorKind::Io, std::string("cannot open '") + path + "'");
        *out = new bq_qubo{bandqubo::read_qubo(in)};
    });
}

BQ_API void bq_qubo_free(bq_qubo* qubo) { delete qubo; }

BQ_API bq_status bq_default_schedule(const bq_qubo* qubo, uint64_t seed, bq_schedule* out) {
    BQ_REQUIRE(qubo && out);
    const auto s = bandqubo::default_schedule(qubo->value, seed);
    *out = bq_schedule{s.t_start, s.t_end, s.sweeps, s.replicas, s.seed};
    return BQ_OK;
}

BQ_API bq_status bq_anneal(const bq_qubo* qubo, const bq_schedule* schedule, size_t threads, bq_solution** out) {
    BQ_REQUIRE(qubo && out);
    return guarded([&] {
        bandqubo::AnnealSchedule s = bandqubo::default_schedule(qubo->value, 0);
        if (schedule) {
            s.t_start = schedule->t_start;
            s.t_end = schedule->t_end;
            s.sweeps = schedule->sweeps;
            s.replicas = schedule->replicas;
            s.seed = schedule->seed;
        }
        bandqubo::AnnealOptions options;
        options.threads = threads;
        *out = new bq_solution{bandqubo::anneal(qubo->value, s, options)};
    });
}

BQ_API bq_status bq_exhaustive(const bq_qubo* qubo, size_t bit_cap, bq_solution** out) {
    BQ_REQUIRE(qubo && out);
    return guarded([&] { *out = new bq_solution{bandqubo::exhaustive_solve(qubo->value, bit_cap)}; });
}

BQ_API size_t bq_solution_num_bits(const bq_solution* solution) {
    return solution ? solution->value.bits.size() : 0;
}

BQ_API bq_status bq_solution_bits(const bq_solution* solution, uint8_t* out, size_t len) {
    BQ_REQUIRE(solution && (out || solution->value.bits.empty()));
    if (len < solution->value.bits.size()) return set_error(BQ_ERR_DIMENSION, "output buffer too small for the bits");
    std::copy(solution->value.bits.begin(), solution->value.bits.end(), out);
    return BQ_OK;
}

BQ_API double bq_solution_energy(const bq_solution* solution) { return solution ? solution->value.energy : 0.0; }

BQ_API void bq_solution_provenance(const bq_solution* solution, size_t* replica, size_t* sweep) {
    if (!solution) return;
    if (replica) *replica = solution->value.replica_id;
    if (sweep) *sweep = solution->value.sweep_found;
}

BQ_API void bq_solution_free(bq_solution* solution) { delete solution; }

BQ_API bq_status bq_evaluate(const bq_market* market, const bq_model* model, const bq_bands* bands,
                             const double* weights, size_t num_assets, bq_portfolio_metrics* out) {
    BQ_REQUIRE(market && model && bands && weights && out);
    return guarded([&] {
        const auto p = bandqubo::evaluate(to_vector(weights, num_assets), market->value,
                                          to_model(*model, market->value.num_assets()), bands->value);
        *out = bq_portfolio_metrics{p.expected_return, p.volatility, p.budget_residual, p.vol_gap, p.band_ok ? 1 : 0};
    });
}

BQ_API bq_status bq_run_load(const char* config_path, bq_run** out) {
    BQ_REQUIRE(config_path && out);
    return guarded([&] { *out = new bq_run{bandqubo::load_run_config(config_path)}; });
}

BQ_API bq_status bq_run_set_seed(bq_run* run, uint64_t seed) {
    BQ_REQUIRE(run);
    run->value.seed = seed;
    return BQ_OK;
}

BQ_API bq_status bq_run_set_output_dir(bq_run* run, const char* dir) {
    BQ_REQUIRE(run && dir);
    run->value.out_dir = dir;
    return BQ_OK;
}

BQ_API bq_status bq_run_execute(bq_run* run, const char* experiment) {
    BQ_REQUIRE(run && experiment);
    return guarded([&] {
        switch (bandqubo::parse_experiment(experiment)) {
            case bandqubo::Experiment::Solve: bandqubo::run_solve(run->value); break;
            case bandqubo::Experiment::Sweep: bandqubo::run_sweep(run->value); break;
            case bandqubo::Experiment::Frontier: bandqubo::run_frontier(run->value); break;
            case bandqubo::Experiment::Cloud: bandqubo::run_cloud(run->value); break;
            case bandqubo::Experiment::Validate:
                bandqubo::fail(bandqubo::ErrorKind::InvalidArgument, "use bq_validate_config for validation");
        }
    });
}

BQ_API void bq_run_free(bq_run* run) { delete run; }

BQ_API bq_status bq_validate_config(const char* config_path, char** report, size_t* error_count) {
    BQ_REQUIRE(config_path && report);
    return guarded([&] {
        const auto r = bandqubo::validate_config_file(config_path);
        const auto text = r.text();
        char* buffer = new char[text.size() + 1];
        std::memcpy(buffer, text.c_str(), text.size() + 1);
        *report = buffer;
        if (error_count) *error_count = r.errors();
    });
}

BQ_API void bq_string_free(char* str) { delete[] str; }

}  // extern "C"
