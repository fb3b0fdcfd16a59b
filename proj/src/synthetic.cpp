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

#include "bandqubo/synthetic.hpp"

#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "bandqubo/error.hpp"
#include "bandqubo/rng.hpp"

namespace bandqubo {

SyntheticMarket synthesize_market(const SyntheticMarketSpec& spec, std::uint64_t seed) {
    if (spec.assets == 0 || spec.sectors == 0 || spec.days < 2) {
        fail(ErrorKind::InvalidArgument, "synthetic market needs assets, sectors and at least 2 days");
    }
    Rng rng(seed);
    const auto lerp = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };

    const std::size_t n = spec.assets;
    std::vector<std::string> names(n);
    std::vector<std::string> sectors(n);
    std::vector<std::size_t> sector_of(n);
    std::vector<double> drift(n), beta(n), idio(n);
    for (std::size_t i = 0; i < n; ++i) {
        names[i] = fmt::format("A{:03d}", i);
        sector_of[i] = i % spec.sectors;
        sectors[i] = fmt::format("S{}", sector_of[i]);
        drift[i] = lerp(spec.drift_min, spec.drift_max);
        beta[i] = lerp(spec.beta_min, spec.beta_max);
        idio[i] = lerp(spec.idio_vol_min, spec.idio_vol_max);
        if (spec.dominant_drift > 0.0 && i < spec.sectors) drift[i] = spec.dominant_drift;
    }

    std::vector<Date> dates;
    dates.reserve(spec.days);
    Date day = parse_date(spec.start_date);
    while (dates.size() < spec.days) {
        const std::chrono::weekday wd{day};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) dates.push_back(day);
        day += std::chrono::days{1};
    }

    Matrix prices(static_cast<Eigen::Index>(spec.days), static_cast<Eigen::Index>(n));
    std::vector<double> log_price(n, std::log(100.0));
    std::vector<double> sector_shock(spec.sectors);
    for (std::size_t t = 0; t < spec.days; ++t) {
        if (t > 0) {
            const double market = spec.market_vol * rng.normal();
            for (auto& s : sector_shock) s = spec.sector_vol * rng.normal();
            for (std::size_t i = 0; i < n; ++i) {
                log_price[i] += drift[i] + beta[i] * market + sector_shock[sector_of[i]] + idio[i] * rng.normal();
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = std::exp(log_price[i]);
        }
    }
    return SyntheticMarket{PriceSeries(std::move(names), std::move(dates), std::move(prices)), std::move(sectors)};
}

}  // namespace bandqubo
