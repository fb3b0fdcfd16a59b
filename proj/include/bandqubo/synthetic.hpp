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
#include <string>
#include <vector>

#include "bandqubo/market_data.hpp"

namespace bandqubo {

/// Factor model for generated prices. Daily log returns are
///   r_n = drift_n + beta_n * m + s_sector(n) + idio_n * e_n
/// with independent standard normal market, sector and asset shocks.
struct SyntheticMarketSpec {
    std::size_t assets = 10;
    std::size_t sectors = 2;
    std::size_t days = 260;
    double market_vol = 0.008;
    double sector_vol = 0.003;
    double idio_vol_min = 0.004;
    double idio_vol_max = 0.012;
    double beta_min = 0.5;
    double beta_max = 1.5;
    double drift_min = -0.0005;
    double drift_max = 0.001;
    /// When positive, the first asset of every sector gets this drift.
    double dominant_drift = 0.0;
    std::string start_date = "2020-04-23";
};

struct SyntheticMarket {
    PriceSeries prices;
    /// Sector tag per asset, aligned with prices.assets(). Assets are dealt
    /// to sectors round-robin.
    std::vector<std::string> sectors;
};

SyntheticMarket synthesize_market(const SyntheticMarketSpec& spec, std::uint64_t seed);

}  // namespace bandqubo
