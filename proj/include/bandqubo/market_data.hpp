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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace bandqubo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Date = std::chrono::sys_days;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
Date parse_date(std::string_view text);
std::string format_date(Date date);

/// Dated closing prices, one row per date and one column per asset.
class PriceSeries {
public:
    /// Validates: positive prices, strictly increasing dates, matching shapes.
    PriceSeries(std::vector<std::string> assets, std::vector<Date> dates, Matrix prices);

    const std::vector<std::string>& assets() const noexcept { return assets_; }
    const std::vector<Date>& dates() const noexcept { return dates_; }
    const Matrix& prices() const noexcept { return prices_; }
    std::size_t num_assets() const noexcept { return assets_.size(); }
    std::size_t num_dates() const noexcept { return dates_.size(); }

    /// Index of the last date <= `date`; throws if `date` precedes the series.
    std::size_t index_at_or_before(Date date) const;

private:
    std::vector<std::string> assets_;
    std::vector<Date> dates_;
    Matrix prices_;
};

enum class MissingPolicy { Reject, ForwardFill };

struct CsvOptions {
    MissingPolicy missing = MissingPolicy::Reject;
    std::uintmax_t max_bytes = 100ULL * 1024 * 1024;
};

/// Reads `date,TICKER1,TICKER2,...` CSV price files.
PriceSeries load_prices(const std::filesystem::path& path, const CsvOptions& options = {});
PriceSeries parse_prices(std::istream& in, const CsvOptions& options = {},
                         std::string_view source = "<stream>");
void write_prices(std::ostream& out, const PriceSeries& series);

/// Row t holds ln(p[t+1] / p[t]); one row fewer than the price matrix.
Matrix log_returns(const PriceSeries& series);

enum class Period { Daily, Yearly };

const char* to_string(Period period) noexcept;

/// Expected per-period log returns and their covariance for one date.
class MarketInputs {
public:
    /// Validates shapes, symmetry (1e-12) and PSD (min eigenvalue >= -1e-10 * max).
    MarketInputs(Vector mu, Matrix sigma, Period period);

    const Vector& mu() const noexcept { return mu_; }
    const Matrix& sigma() const noexcept { return sigma_; }
    Period period() const noexcept { return period_; }
    std::size_t num_assets() const noexcept { return static_cast<std::size_t>(mu_.size()); }

private:
    Vector mu_;
    Matrix sigma_;
    Period period_;
};

/// Trailing-window estimate over return rows [as_of - window, as_of).
/// Mean of each column and unbiased (window - 1) sample covariance.
MarketInputs estimate_inputs(const Matrix& returns, std::size_t window, std::size_t as_of);

/// Scales mu and sigma by `periods_per_year`. Already-yearly input is
/// returned unchanged with a logged warning.
MarketInputs annualize(const MarketInputs& inputs, int periods_per_year = 252);

}  // namespace bandqubo
