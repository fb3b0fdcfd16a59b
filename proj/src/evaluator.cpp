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

#include "bandqubo/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bandqubo/error.hpp"
#include "bandqubo/rng.hpp"

namespace bandqubo {

Portfolio evaluate(const Vector& weights, const MarketInputs& inputs, const ModelConfig& cfg,
                   const BandSpec& bands) {
    const std::size_t n = inputs.num_assets();
    if (static_cast<std::size_t>(weights.size()) != n || bands.size() != n) {
        fail(ErrorKind::Dimension, fmt::format("weights ({}), bands ({}) and market ({}) disagree",
                                               weights.size(), bands.size(), n));
    }
    Portfolio p;
    p.weights = weights;
    p.expected_return = inputs.mu().dot(weights);
    p.volatility = std::sqrt(std::max(0.0, weights.dot(inputs.sigma() * weights)));
    p.budget_residual = weights.sum() - 1.0;
    p.vol_gap = p.volatility - cfg.sigma_target;
    p.band_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights[static_cast<Eigen::Index>(i)];
        if (w < bands[i].w_min - 1e-12 || w > bands[i].w_max + 1e-12) p.band_ok = false;
    }
    return p;
}

BandSpec free_bands(const std::vector<std::string>& assets) {
    std::vector<AssetBand> out;
    out.reserve(assets.size());
    for (const auto& a : assets) out.push_back({a, 0.0, 1.0, {}});
    return BandSpec(std::move(out));
}

std::vector<Portfolio> random_cloud(std::size_t count, const BandSpec& bands, const EncodingSpec& spec,
                                    const MarketInputs& inputs, const ModelConfig& cfg,
                                    std::uint64_t seed) {
    const std::size_t n = spec.num_assets();
    if (bands.size() != n || inputs.num_assets() != n) {
        fail(ErrorKind::Dimension, "bands, encoding and market disagree on the asset count");
    }
    const double k = static_cast<double>(spec.total_units());
    const double target_units = k * (1.0 - bands.sum_min());
    const std::size_t attempt_cap = 100 * std::max<std::size_t>(count, 1);

    std::vector<Portfolio> cloud;
    cloud.reserve(count);
    std::size_t attempts = 0;
    Bits bits(spec.total_bits());
    std::vector<std::size_t> candidates;
    candidates.reserve(n);
    for (std::size_t sample = 0; sample < count; ++sample) {
        Rng rng(derive_seed(seed, sample));
        while (true) {
            if (attempts++ >= attempt_cap) {
                fail(ErrorKind::Infeasible,
                     fmt::format("no budget-feasible random portfolio after {} draws", attempt_cap));
            }
            for (auto& b : bits) b = rng.coin() ? 1 : 0;
            auto units = decode_units(bits, spec);
            double held = 0.0;
            for (const auto u : units) held += static_cast<double>(u);

            bool reachable = true;
            while (std::abs(held - target_units) > 0.5 + 1e-9) {
                const bool add = held < target_units;
                candidates.clear();
                for (std::size_t i = 0; i < n; ++i) {
                    if (add ? units[i] < spec.asset(i).units : units[i] > 0) candidates.push_back(i);
                }
                if (candidates.empty()) {
                    reachable = false;
                    break;
                }
                const auto pick = candidates[rng.below(candidates.size())];
                units[pick] += add ? 1 : -1;
                held += add ? 1.0 : -1.0;
            }
            if (!reachable) continue;

            Vector w(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i) {
                w[static_cast<Eigen::Index>(i)] = std::clamp(
                    bands[i].w_min + static_cast<double>(units[i]) / k, bands[i].w_min, bands[i].w_max);
            }
            cloud.push_back(evaluate(w, inputs, cfg, bands));
            break;
        }
    }
    return cloud;
}

double ewi_return(const PriceSeries& series, std::size_t start, std::size_t end, EwiMode mode) {
    if (start > end || end >= series.num_dates()) {
        fail(ErrorKind::InvalidArgument, fmt::format("EWI window [{}, {}] outside the {} dates of the series",
                                                     start, end, series.num_dates()));
    }
    const Matrix& p = series.prices();
    const auto s = static_cast<Eigen::Index>(start);
    const auto e = static_cast<Eigen::Index>(end);
    if (mode == EwiMode::BuyAndHold) {
        return (p.row(e).array() / p.row(s).array()).mean() - 1.0;
    }
    double growth = 1.0;
    for (Eigen::Index t = s; t < e; ++t) growth *= (p.row(t + 1).array() / p.row(t).array()).mean();
    return growth - 1.0;
}

}  // namespace bandqubo
