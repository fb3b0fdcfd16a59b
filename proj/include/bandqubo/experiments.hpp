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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bandqubo/config.hpp"
#include "bandqubo/encoding.hpp"
#include "bandqubo/evaluator.hpp"
#include "bandqubo/market_data.hpp"
#include "bandqubo/qubo.hpp"
#include "bandqubo/solver.hpp"

namespace bandqubo {

/// Market data, estimated inputs and resolved bands for one run.
struct PreparedRun {
    PriceSeries series;
    std::vector<std::string> sectors;
    MarketInputs inputs;
    BandSpec bands;
    std::size_t as_of = 0;         ///< price index of the trading date
    std::size_t window_start = 0;  ///< price index where the estimation window opens
};

PreparedRun prepare_run(const RunConfig& cfg);

/// Cost-function settings for one optimization. Unset multipliers in `cfg`
/// take default_rho / default_lambda_vol; k starts uniform.
ModelConfig model_for(const RunConfig& cfg, const MarketInputs& inputs, double gamma, bool vol_constraint,
                      double sigma_target);

struct SolveResult {
    Portfolio portfolio;
    Solution solution;
    ModelConfig model;
    std::optional<Qubo> qubo;
    double direct_cost = 0.0;
    std::size_t bits = 0;
    bool pinned = false;  ///< every band has zero width; nothing to solve
};

/// Encodes, builds, solves and decodes. With refine_iterations > 0 the
/// linear weights are pulled toward each solution and the QUBO rebuilt.
SolveResult optimize(const PreparedRun& run, const RunConfig& cfg, ModelConfig model);

/// Writes composition.csv, solution.txt, qubo.txt and summary.txt.
SolveResult run_solve(const RunConfig& cfg);

struct SweepPoint {
    double gamma = 0.0;
    double realized_vol = 0.0;
    double constraint_value = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;  ///< sorted by realized volatility
    std::size_t best = 0;            ///< index of the smallest constraint value
    double grid_step = 0.0;          ///< volatility resolution the curve is judged at
};

/// Scans gamma (or samples random portfolios) and records the volatility
/// penalty at each realized volatility. Writes sweep.csv and summary.txt.
SweepResult run_sweep(const RunConfig& cfg);

struct FrontierRow {
    double volatility = 0.0;
    double expected_return = 0.0;
    std::string label;
};

struct FrontierResult {
    std::vector<FrontierRow> rows;
    std::vector<SolveResult> optima;
    std::vector<Portfolio> cloud;
};

/// One optimization per target volatility, a random cloud and the EWI row.
/// Writes frontier.csv and summary.txt.
FrontierResult run_frontier(const RunConfig& cfg);

/// Random cloud and EWI row only. Writes frontier.csv and summary.txt.
FrontierResult run_cloud(const RunConfig& cfg);

struct Diagnostic {
    bool error = true;
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Diagnostic> items;

    std::size_t errors() const noexcept;
    std::string text() const;
};

/// Checks data, bands, encoding, covariance and multiplier scales. Reports
/// only; never throws for problems it can describe and writes nothing.
ValidationReport validate_run(const RunConfig& cfg);
ValidationReport validate_config_file(const std::filesystem::path& path);

}  // namespace bandqubo
