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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bandqubo/market_data.hpp"

namespace bandqubo {

using Bits = std::vector<std::uint8_t>;
using BitsView = std::span<const std::uint8_t>;

struct AssetBand {
    std::string asset;
    double w_min = 0.0;
    double w_max = 1.0;
    std::string sector;
};

/// Per-asset investment bands. Construction checks 0 <= w_min <= w_max <= 1;
/// budget feasibility is a separate query so diagnostics can report it.
class BandSpec {
public:
    BandSpec() = default;
    explicit BandSpec(std::vector<AssetBand> bands);

    std::size_t size() const noexcept { return bands_.size(); }
    const AssetBand& operator[](std::size_t n) const { return bands_[n]; }
    const std::vector<AssetBand>& bands() const noexcept { return bands_; }

    double sum_min() const noexcept;
    double sum_max() const noexcept;
    /// sum(w_min) <= 1 <= sum(w_max) within 1e-12.
    bool budget_feasible() const noexcept;
    /// Throws ErrorKind::Infeasible when the full budget is unreachable.
    void require_budget_feasible() const;

    /// Reorders the bands to follow `assets`; throws if any asset is missing.
    BandSpec aligned_to(const std::vector<std::string>& assets) const;

private:
    std::vector<AssetBand> bands_;
};

using SectorBands = std::map<std::string, std::pair<double, double>>;

/// Splits each sector band (a, b) evenly over its s members: (a/s, b/s).
/// `membership` lists (asset, sector) in output order; `overrides` replace
/// the split band for individual assets.
BandSpec sector_to_asset_bands(const SectorBands& sector_bands,
                               const std::vector<std::pair<std::string, std::string>>& membership,
                               const std::map<std::string, std::pair<double, double>>& overrides = {});

/// Bit layout of one asset: units = K * (w_max - w_min) investment units
/// split into `depth` binary bits plus an optional residual bit worth
/// `residual` units.
struct AssetEncoding {
    std::int64_t units = 0;
    int depth = 0;
    std::int64_t residual = 0;
    std::size_t bit_offset = 0;

    std::size_t num_bits() const noexcept {
        return static_cast<std::size_t>(depth) + (residual > 0 ? 1 : 0);
    }
    /// Units carried by local bit `q` (q == depth is the residual bit).
    std::int64_t bit_value(std::size_t q) const noexcept {
        return q < static_cast<std::size_t>(depth) ? (std::int64_t{1} << q) : residual;
    }
};

enum class GridMode {
    Integral,    ///< K * (w_max - w_min) must be an integer
    Continuous,  ///< band width is rounded down to whole units
};

class EncodingSpec {
public:
    EncodingSpec(int total_units, std::vector<AssetEncoding> assets);

    int total_units() const noexcept { return total_units_; }
    std::size_t num_assets() const noexcept { return assets_.size(); }
    std::size_t total_bits() const noexcept { return total_bits_; }
    const AssetEncoding& asset(std::size_t n) const { return assets_[n]; }
    const std::vector<AssetEncoding>& assets() const noexcept { return assets_; }

    /// (asset, local bit) for a global bit index.
    std::pair<std::size_t, std::size_t> label(std::size_t bit) const { return labels_[bit]; }
    /// Units carried by a global bit.
    std::int64_t bit_value(std::size_t bit) const {
        const auto [n, q] = labels_[bit];
        return assets_[n].bit_value(q);
    }

private:
    int total_units_;
    std::vector<AssetEncoding> assets_;
    std::vector<std::pair<std::size_t, std::size_t>> labels_;
    std::size_t total_bits_ = 0;
};

/// Largest depth d with 2^d - 1 <= units.
int max_bit_depth(std::int64_t units) noexcept;

/// Chooses depth = max_bit_depth(units) and residual = units - (2^depth - 1),
/// so all-ones decodes exactly to w_max. `forced_depth` pins the depth of
/// every non-locked asset and fails if the residual would be negative.
EncodingSpec make_encoding(const BandSpec& bands, int total_units,
                           GridMode mode = GridMode::Integral,
                           std::optional<int> forced_depth = std::nullopt);

/// Units held above w_min by each asset.
std::vector<std::int64_t> decode_units(BitsView bits, const EncodingSpec& spec);

/// w_n = w_min_n + units_n / K, clamped into the band.
Vector decode(BitsView bits, const EncodingSpec& spec, const BandSpec& bands);

/// Bits whose decode is the nearest grid point to `weights`.
Bits encode_nearest(const Vector& weights, const EncodingSpec& spec, const BandSpec& bands);

/// Bits for the representable unit count nearest to `units`; ties leave the
/// residual bit clear.
void encode_units(std::int64_t units, const AssetEncoding& enc, std::span<std::uint8_t> out);

}  // namespace bandqubo
