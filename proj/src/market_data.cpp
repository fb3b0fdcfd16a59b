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

#include "bandqubo/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "bandqubo/error.hpp"
#include "log.hpp"

namespace bandqubo {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

std::optional<double> parse_double(std::string_view s) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::optional<int> parse_int(std::string_view s) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

}  // namespace

Date parse_date(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        fail(ErrorKind::Parse, fmt::format("invalid ISO date '{}'", text));
    }
    const auto y = parse_int(text.substr(0, 4));
    const auto m = parse_int(text.substr(5, 2));
    const auto d = parse_int(text.substr(8, 2));
    if (!y || !m || !d) fail(ErrorKind::Parse, fmt::format("invalid ISO date '{}'", text));
    const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                          std::chrono::month{static_cast<unsigned>(*m)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) fail(ErrorKind::Parse, fmt::format("invalid calendar date '{}'", text));
    return Date{ymd};
}

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

PriceSeries::PriceSeries(std::vector<std::string> assets, std::vector<Date> dates, Matrix prices)
    : assets_(std::move(assets)), dates_(std::move(dates)), prices_(std::move(prices)) {
    if (assets_.empty()) fail(ErrorKind::Validation, "price series has no assets");
    if (static_cast<std::size_t>(prices_.cols()) != assets_.size() ||
        static_cast<std::size_t>(prices_.rows()) != dates_.size()) {
        fail(ErrorKind::Dimension,
             fmt::format("price matrix is {}x{} but series has {} dates and {} assets",
                         prices_.rows(), prices_.cols(), dates_.size(), assets_.size()));
    }
    for (std::size_t t = 1; t < dates_.size(); ++t) {
        if (dates_[t] <= dates_[t - 1]) {
            fail(ErrorKind::Validation,
                 fmt::format("dates not strictly increasing: {} follows {}",
                             format_date(dates_[t]), format_date(dates_[t - 1])));
        }
    }
    for (Eigen::Index t = 0; t < prices_.rows(); ++t) {
        for (Eigen::Index n = 0; n < prices_.cols(); ++n) {
            const double p = prices_(t, n);
            if (!(p > 0.0) || !std::isfinite(p)) {
                fail(ErrorKind::Validation,
                     fmt::format("non-positive price {} at date {} asset {}", p,
                                 format_date(dates_[static_cast<std::size_t>(t)]),
                                 assets_[static_cast<std::size_t>(n)]));
            }
        }
    }
}

std::size_t PriceSeries::index_at_or_before(Date date) const {
    const auto it = std::upper_bound(dates_.begin(), dates_.end(), date);
    if (it == dates_.begin()) {
        fail(ErrorKind::InsufficientData,
             fmt::format("date {} precedes the price series", format_date(date)));
    }
    return static_cast<std::size_t>(it - dates_.begin()) - 1;
}

PriceSeries load_prices(const std::filesystem::path& path, const CsvOptions& options) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) fail(ErrorKind::Io, fmt::format("cannot open price file '{}'", path.string()));
    if (size > options.max_bytes) {
        fail(ErrorKind::Io, fmt::format("price file '{}' is {} bytes, cap is {}", path.string(),
                                        size, options.max_bytes));
    }
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, fmt::format("cannot open price file '{}'", path.string()));
    return parse_prices(in, options, path.string());
}

PriceSeries parse_prices(std::istream& in, const CsvOptions& options, std::string_view source) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> assets;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    const auto header = split_commas(line);
    if (header.size() < 2 || header[0] != "date") {
        fail(ErrorKind::Parse, fmt::format("{}:{}: header must be 'date,TICKER,...'", source, line_no));
    }
    for (std::size_t i = 1; i < header.size(); ++i) {
        if (header[i].empty()) fail(ErrorKind::Parse, fmt::format("{}:{}: empty ticker", source, line_no));
        assets.emplace_back(header[i]);
    }

    std::vector<Date> dates;
    std::vector<double> cells;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto row = split_commas(line);
        if (row.size() != header.size()) {
            fail(ErrorKind::Parse, fmt::format("{}:{}: expected {} fields, got {}", source, line_no,
                                               header.size(), row.size()));
        }
        try {
            dates.push_back(parse_date(row[0]));
        } catch (const Error& e) {
            fail(ErrorKind::Parse, fmt::format("{}:{}: {}", source, line_no, e.what()));
        }
        for (std::size_t i = 1; i < row.size(); ++i) {
            if (row[i].empty()) {
                if (options.missing == MissingPolicy::Reject || dates.size() == 1) {
                    fail(ErrorKind::Validation, fmt::format("{}:{}: missing price for {}", source,
                                                            line_no, assets[i - 1]));
                }
                cells.push_back(cells[cells.size() - assets.size()]);
                continue;
            }
            const auto value = parse_double(row[i]);
            if (!value) {
                fail(ErrorKind::Parse, fmt::format("{}:{}: cannot parse price '{}' for {}", source,
                                                   line_no, row[i], assets[i - 1]));
            }
            cells.push_back(*value);
        }
    }
    Matrix prices(static_cast<Eigen::Index>(dates.size()), static_cast<Eigen::Index>(assets.size()));
    for (std::size_t t = 0; t < dates.size(); ++t) {
        for (std::size_t n = 0; n < assets.size(); ++n) {
            prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(n)) = cells[t * assets.size() + n];
        }
    }
    return PriceSeries(std::move(assets), std::move(dates), std::move(prices));
}

void write_prices(std::ostream& out, const PriceSeries& series) {
    out << "date";
    for (const auto& a : series.assets()) out << ',' << a;
    out << '\n';
    for (std::size_t t = 0; t < series.num_dates(); ++t) {
        out << format_date(series.dates()[t]);
        for (std::size_t n = 0; n < series.num_assets(); ++n) {
            out << ',' << fmt::format("{}", series.prices()(static_cast<Eigen::Index>(t),
                                                                 static_cast<Eigen::Index>(n)));
        }
        out << '\n';
    }
}

Matrix log_returns(const PriceSeries& series) {
    const Matrix& p = series.prices();
    if (p.rows() < 2) {
        fail(ErrorKind::InsufficientData,
             fmt::format("log returns need at least 2 dates, series has {}", p.rows()));
    }
    Matrix r(p.rows() - 1, p.cols());
    for (Eigen::Index t = 0; t + 1 < p.rows(); ++t) {
        for (Eigen::Index n = 0; n < p.cols(); ++n) r(t, n) = std::log(p(t + 1, n) / p(t, n));
    }
    return r;
}

const char* to_string(Period period) noexcept {
    return period == Period::Daily ? "daily" : "yearly";
}

MarketInputs::MarketInputs(Vector mu, Matrix sigma, Period period)
    : mu_(std::move(mu)), sigma_(std::move(sigma)), period_(period) {
    const auto n = mu_.size();
    if (n == 0) fail(ErrorKind::Validation, "market inputs have no assets");
    if (sigma_.rows() != n || sigma_.cols() != n) {
        fail(ErrorKind::Dimension, fmt::format("mu has {} entries but covariance is {}x{}", n,
                                               sigma_.rows(), sigma_.cols()));
    }
    if (!mu_.allFinite() || !sigma_.allFinite()) {
        fail(ErrorKind::Validation, "market inputs contain NaN or Inf");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(sigma_(i, j) - sigma_(j, i)) > 1e-12) {
                fail(ErrorKind::Validation,
                     fmt::format("covariance not symmetric at ({}, {})", i, j));
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma_, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (lo < -1e-10 * std::max(hi, 0.0) && lo < -1e-300) {
        fail(ErrorKind::Validation,
             fmt::format("covariance not positive semidefinite (min eigenvalue {:.3e}, max {:.3e})",
                         lo, hi));
    }
}

MarketInputs estimate_inputs(const Matrix& returns, std::size_t window, std::size_t as_of) {
    if (window < 2) fail(ErrorKind::InvalidArgument, "covariance window must be at least 2");
    if (as_of > static_cast<std::size_t>(returns.rows()) || window > as_of) {
        fail(ErrorKind::InsufficientData,
             fmt::format("window {} ending at row {} needs more than the {} return rows available",
                         window, as_of, returns.rows()));
    }
    const auto w = static_cast<Eigen::Index>(window);
    const auto slice = returns.middleRows(static_cast<Eigen::Index>(as_of) - w, w);
    Vector mu = slice.colwise().mean().transpose();
    const Matrix centered = slice.rowwise() - mu.transpose();
    Matrix sigma = (centered.transpose() * centered) / static_cast<double>(window - 1);
    // Mirror the upper triangle so the result is exactly symmetric.
    sigma.triangularView<Eigen::StrictlyLower>() = sigma.transpose();
    return MarketInputs(std::move(mu), std::move(sigma), Period::Daily);
}

MarketInputs annualize(const MarketInputs& inputs, int periods_per_year) {
    if (periods_per_year <= 0) fail(ErrorKind::InvalidArgument, "periods_per_year must be positive");
    if (inputs.period() == Period::Yearly) {
        log().warn("annualize: inputs are already yearly; leaving them unchanged");
        return inputs;
    }
    const double f = static_cast<double>(periods_per_year);
    return MarketInputs(inputs.mu() * f, inputs.sigma() * f, Period::Yearly);
}

}  // namespace bandqubo
