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
#include <vector>

#include "bandqubo/encoding.hpp"
#include "bandqubo/market_data.hpp"
#include "bandqubo/qubo.hpp"

namespace bandqubo {

/// A weight vector and its metrics, all in the period units of the inputs.
struct Portfolio {
    Vector weights;
    double expected_return = 0.0;  ///< mu'w
    double volatility = 0.0;       ///< sqrt(w'Sw)
    double budget_residual = 0.0;  ///< sum(w) - 1
    double vol_gap = 0.0;          ///< volatility - sigma_target
    bool band_ok = false;
};

Portfolio evaluate(const Vector& weights, const MarketInputs& inputs, const ModelConfig& cfg,
                   const BandSpec& bands);

/// Random feasible portfolios: uniform random bits are decoded, then whole
/// units are added to or removed from randomly chosen assets until the
/// budget is met within half a unit. Sample i draws from derive_seed(seed, i).
/// Fails with ErrorKind::Infeasible after 100 * count unsuccessful draws.
std::vector<Portfolio> random_cloud(std::size_t count, const BandSpec& bands, const EncodingSpec& spec,
                                    const MarketInputs& inputs, const ModelConfig& cfg,
                                    std::uint64_t seed);

/// [0, 1] bands for every asset; used for clouds that ignore the optimizer's bands.
BandSpec free_bands(const std::vector<std::string>& assets);

enum class EwiMode { BuyAndHold, Rebalanced };

/// Total return of an equal 1/N allocation from date index `start` to `end`.
/// BuyAndHold invests once at `start`; Rebalanced resets to 1/N every period.
double ewi_return(const PriceSeries& series, std::size_t start, std::size_t end,
                  EwiMode mode = EwiMode::BuyAndHold);

}  // namespace bandqubo
