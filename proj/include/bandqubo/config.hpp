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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bandqubo/encoding.hpp"
#include "bandqubo/evaluator.hpp"
#include "bandqubo/market_data.hpp"
#include "bandqubo/synthetic.hpp"

namespace bandqubo {

enum class Experiment { Solve, Sweep, Frontier, Cloud, Validate };
enum class SolverKind { Anneal, Exhaustive };
enum class SweepMode { Gamma, Sample };
enum class CloudBandsMode { Optimizer, Free };

Experiment parse_experiment(std::string_view name);
const char* to_string(Experiment e) noexcept;

/// One row of the [assets] table. Empty optionals fall back to the sector
/// split or the default band.
struct AssetRow {
    std::string asset;
    std::optional<double> w_min;
    std::optional<double> w_max;
    std::string sector;
};

/// Everything needed to reproduce a run. Loaded from a flat `key = value`
/// file with `[assets]`, `[sectors]` and `[synthetic]` sections.
struct RunConfig {
    std::filesystem::path base_dir;

    // Market data: a CSV file, or a generated market.
    std::optional<std::filesystem::path> data;
    std::optional<SyntheticMarketSpec> synthetic;
    std::uint64_t synthetic_seed = 1;
    CsvOptions csv;
    std::optional<Date> as_of;
    std::size_t window = 63;
    Period period = Period::Daily;
    int periods_per_year = 252;

    // Encoding.
    int units = 100;
    GridMode grid = GridMode::Integral;
    std::optional<int> bit_depth;

    // Cost function. Unset multipliers use the scale-based defaults.
    double gamma = 1.0;
    std::optional<double> rho;
    std::optional<double> lambda_vol;
    double sigma_target = 0.0;
    bool vol_constraint = false;
    std::size_t refine_iterations = 0;
    double refine_damping = 0.5;

    // Solver.
    SolverKind solver = SolverKind::Anneal;
    std::optional<double> t_start;
    std::optional<double> t_end;
    std::optional<std::size_t> sweeps;
    std::optional<std::size_t> replicas;
    std::size_t threads = 0;
    std::size_t exhaustive_cap = 24;
    std::uint64_t seed = 0;

    // Experiments.
    Experiment experiment = Experiment::Solve;
    std::filesystem::path out_dir = "out";
    std::vector<double> targets;
    std::size_t cloud_count = 1000;
    CloudBandsMode cloud_bands = CloudBandsMode::Optimizer;
    EwiMode ewi = EwiMode::BuyAndHold;
    SweepMode sweep_mode = SweepMode::Gamma;
    double sweep_gamma_min = 0.01;
    double sweep_gamma_max = 1000.0;
    std::size_t sweep_points = 40;
    std::size_t sweep_samples = 2000;
    /// Volatility grid step of the sweep curve; defaults to sigma_target / 10.
    std::optional<double> sweep_vol_step;

    // Bands.
    std::vector<AssetRow> assets;
    SectorBands sector_bands;
    double default_w_min = 0.0;
    double default_w_max = 1.0;
};

/// Relative paths in the config resolve against `base_dir`.
RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir = {},
                           std::string_view source_name = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

/// Resolves bands for `assets` (in market order). Asset rows with explicit
/// bounds override sector splits; assets without either get the default band.
/// `market_sectors` supplies sector tags for assets missing from [assets].
BandSpec resolve_bands(const RunConfig& cfg, const std::vector<std::string>& assets,
                       const std::vector<std::string>& market_sectors = {});

}  // namespace bandqubo
