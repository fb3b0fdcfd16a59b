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

#include "bandqubo/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

#include "bandqubo/error.hpp"

namespace bandqubo {

namespace {

constexpr double kBandTol = 1e-12;
constexpr double kIntegralTol = 1e-9;

}  // namespace

BandSpec::BandSpec(std::vector<AssetBand> bands) : bands_(std::move(bands)) {
    for (const auto& b : bands_) {
        if (!(b.w_min >= -kBandTol) || !(b.w_max <= 1.0 + kBandTol) || !(b.w_min <= b.w_max + kBandTol)) {
            fail(ErrorKind::Validation,
                 fmt::format("band for {} must satisfy 0 <= w_min <= w_max <= 1, got [{}, {}]", b.asset,
                             b.w_min, b.w_max));
        }
    }
}

double BandSpec::sum_min() const noexcept {
    double s = 0.0;
    for (const auto& b : bands_) s += b.w_min;
    return s;
}

double BandSpec::sum_max() const noexcept {
    double s = 0.0;
    for (const auto& b : bands_) s += b.w_max;
    return s;
}

bool BandSpec::budget_feasible() const noexcept {
    return sum_min() <= 1.0 + kBandTol && sum_max() >= 1.0 - kBandTol;
}

void BandSpec::require_budget_feasible() const {
    if (!budget_feasible()) {
        fail(ErrorKind::Infeasible,
             fmt::format("bands cannot hold the full budget: sum(w_min) = {:.6g}, sum(w_max) = {:.6g}",
                         sum_min(), sum_max()));
    }
}

BandSpec BandSpec::aligned_to(const std::vector<std::string>& assets) const {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < bands_.size(); ++i) index.emplace(bands_[i].asset, i);
    std::vector<AssetBand> out;
    out.reserve(assets.size());
    for (const auto& a : assets) {
        const auto it = index.find(a);
        if (it == index.end()) fail(ErrorKind::Validation, fmt::format("no band given for asset {}", a));
        out.push_back(bands_[it->second]);
    }
    if (out.size() != bands_.size()) {
        fail(ErrorKind::Validation, fmt::format("{} bands given for {} assets", bands_.size(), assets.size()));
    }
    return BandSpec(std::move(out));
}

BandSpec sector_to_asset_bands(const SectorBands& sector_bands,
                               const std::vector<std::pair<std::string, std::string>>& membership,
                               const std::map<std::string, std::pair<double, double>>& overrides) {
    std::map<std::string, std::size_t> members;
    for (const auto& [asset, sector] : membership) {
        if (sector.empty()) fail(ErrorKind::Validation, fmt::format("asset {} has no sector", asset));
        ++members[sector];
    }
    for (const auto& [sector, band] : sector_bands) {
        if (!members.count(sector) && band.first > 0.0) {
            fail(ErrorKind::Infeasible,
                 fmt::format("sector {} has no assets but a minimum investment of {}", sector, band.first));
        }
    }
    std::vector<AssetBand> out;
    out.reserve(membership.size());
    for (const auto& [asset, sector] : membership) {
        AssetBand b{asset, 0.0, 0.0, sector};
        if (const auto o = overrides.find(asset); o != overrides.end()) {
            b.w_min = o->second.first;
            b.w_max = o->second.second;
        } else {
            const auto it = sector_bands.find(sector);
            if (it == sector_bands.end()) {
                fail(ErrorKind::Validation, fmt::format("sector {} of asset {} has no band", sector, asset));
            }
            const double s = static_cast<double>(members[sector]);
            b.w_min = it->second.first / s;
            b.w_max = it->second.second / s;
        }
        out.push_back(std::move(b));
    }
    return BandSpec(std::move(out));
}

EncodingSpec::EncodingSpec(int total_units, std::vector<AssetEncoding> assets)
    : total_units_(total_units), assets_(std::move(assets)) {
    if (total_units_ <= 0) fail(ErrorKind::InvalidArgument, "total investment units K must be positive");
    for (std::size_t n = 0; n < assets_.size(); ++n) {
        auto& a = assets_[n];
        if (a.residual < 0 || a.depth < 0 || a.depth > 62) {
            fail(ErrorKind::Encoding, fmt::format("invalid encoding for asset {}", n));
        }
        if (a.units != ((std::int64_t{1} << a.depth) - 1) + a.residual) {
            fail(ErrorKind::Encoding, fmt::format("encoding of asset {} does not cover its band", n));
        }
        a.bit_offset = total_bits_;
        for (std::size_t q = 0; q < a.num_bits(); ++q) labels_.emplace_back(n, q);
        total_bits_ += a.num_bits();
    }
}

int max_bit_depth(std::int64_t units) noexcept {
    int depth = 0;
    while (depth < 62 && (std::int64_t{1} << (depth + 1)) - 1 <= units) ++depth;
    return depth;
}

EncodingSpec make_encoding(const BandSpec& bands, int total_units, GridMode mode,
                           std::optional<int> forced_depth) {
    if (total_units <= 0) fail(ErrorKind::InvalidArgument, "total investment units K must be positive");
    std::vector<AssetEncoding> assets;
    assets.reserve(bands.size());
    for (const auto& b : bands.bands()) {
        const double width = static_cast<double>(total_units) * (b.w_max - b.w_min);
        std::int64_t units;
        if (mode == GridMode::Integral) {
            units = std::llround(width);
            if (std::abs(width - static_cast<double>(units)) > kIntegralTol) {
                fail(ErrorKind::Encoding,
                     fmt::format("K*(w_max - w_min) = {:.12g} for asset {} is not an integer", width, b.asset));
            }
        } else {
            units = static_cast<std::int64_t>(std::floor(width + kIntegralTol));
        }
        units = std::max<std::int64_t>(units, 0);

        AssetEncoding enc;
        enc.units = units;
        enc.depth = max_bit_depth(units);
        if (forced_depth && units > 0) {
            if (*forced_depth < 0 || *forced_depth > 62 ||
                (std::int64_t{1} << *forced_depth) - 1 > units) {
                fail(ErrorKind::Encoding,
                     fmt::format("bit depth {} needs at least {} units for asset {}, band has {}",
                                 *forced_depth,
                                 *forced_depth > 62 ? -1 : (std::int64_t{1} << *forced_depth) - 1,
                                 b.asset, units));
            }
            enc.depth = *forced_depth;
        }
        enc.residual = units - ((std::int64_t{1} << enc.depth) - 1);
        assets.push_back(enc);
    }
    return EncodingSpec(total_units, std::move(assets));
}

std::vector<std::int64_t> decode_units(BitsView bits, const EncodingSpec& spec) {
    if (bits.size() != spec.total_bits()) {
        fail(ErrorKind::Dimension,
             fmt::format("bit vector has {} entries, encoding expects {}", bits.size(), spec.total_bits()));
    }
    std::vector<std::int64_t> units(spec.num_assets(), 0);
    for (std::size_t n = 0; n < spec.num_assets(); ++n) {
        const auto& a = spec.asset(n);
        for (std::size_t q = 0; q < a.num_bits(); ++q) {
            if (bits[a.bit_offset + q]) units[n] += a.bit_value(q);
        }
    }
    return units;
}

Vector decode(BitsView bits, const EncodingSpec& spec, const BandSpec& bands) {
    if (bands.size() != spec.num_assets()) {
        fail(ErrorKind::Dimension, fmt::format("{} bands for an encoding of {} assets", bands.size(),
                                               spec.num_assets()));
    }
    const auto units = decode_units(bits, spec);
    const double k = static_cast<double>(spec.total_units());
    Vector w(static_cast<Eigen::Index>(units.size()));
    for (std::size_t n = 0; n < units.size(); ++n) {
        const double v = bands[n].w_min + static_cast<double>(units[n]) / k;
        w[static_cast<Eigen::Index>(n)] = std::clamp(v, bands[n].w_min, bands[n].w_max);
    }
    return w;
}

void encode_units(std::int64_t units, const AssetEncoding& enc, std::span<std::uint8_t> out) {
    std::fill(out.begin(), out.end(), std::uint8_t{0});
    const std::int64_t binary_max = (std::int64_t{1} << enc.depth) - 1;
    if (units > binary_max) {
        // A forced depth can leave a gap between 2^depth - 1 and the residual.
        const std::int64_t rest = std::clamp<std::int64_t>(units - enc.residual, 0, binary_max);
        if (std::abs(units - enc.residual - rest) < units - binary_max) {
            out[static_cast<std::size_t>(enc.depth)] = 1;
            units = rest;
        } else {
            units = binary_max;
        }
    }
    for (int q = 0; q < enc.depth; ++q) out[static_cast<std::size_t>(q)] = (units >> q) & 1;
}

Bits encode_nearest(const Vector& weights, const EncodingSpec& spec, const BandSpec& bands) {
    if (static_cast<std::size_t>(weights.size()) != spec.num_assets() || bands.size() != spec.num_assets()) {
        fail(ErrorKind::Dimension, "weights, bands and encoding disagree on the asset count");
    }
    Bits bits(spec.total_bits(), 0);
    const double k = static_cast<double>(spec.total_units());
    for (std::size_t n = 0; n < spec.num_assets(); ++n) {
        const double w = weights[static_cast<Eigen::Index>(n)];
        if (!(w >= bands[n].w_min - kBandTol && w <= bands[n].w_max + kBandTol)) {
            fail(ErrorKind::Validation, fmt::format("weight {} of {} lies outside its band [{}, {}]", w,
                                                    bands[n].asset, bands[n].w_min, bands[n].w_max));
        }
        const auto& a = spec.asset(n);
        const auto u = std::clamp<std::int64_t>(std::llround((w - bands[n].w_min) * k), 0, a.units);
        encode_units(u, a, std::span<std::uint8_t>(bits).subspan(a.bit_offset, a.num_bits()));
    }
    return bits;
}

}  // namespace bandqubo
