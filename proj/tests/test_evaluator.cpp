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


#include <cmath>

#include <catch_amalgamated.hpp>

#include "bandqubo/encoding.hpp"
#include "bandqubo/error.hpp"
#include "bandqubo/evaluator.hpp"
#include "bandqubo/rng.hpp"
#include "bandqubo/synthetic.hpp"
#include "test_support.hpp"

using namespace bandqubo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Build;
}

PriceSeries two_dates(std::vector<double> first, std::vector<double> last) {
    const std::size_t n = first.size();
    Matrix p(2, n);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        p(0, i) = first[i];
        p(1, i) = last[i];
        names.push_back("A" + std::to_string(i));
    }
    return PriceSeries(names, {parse_date("2021-01-04"), parse_date("2021-01-05")}, p);
}

}  // namespace

TEST_CASE("portfolio metrics", "[evaluator]") {
    SECTION("identity covariance, equal weights") {
        for (std::size_t n : {1u, 4u, 9u}) {
            const MarketInputs in(Vector::Zero(n), Matrix::Identity(n, n), Period::Yearly);
            const auto p = evaluate(Vector::Constant(n, 1.0 / n), in, ModelConfig{},
                                    free_bands(testing::asset_names(n)));
            CHECK_THAT(p.volatility, WithinRel(1.0 / std::sqrt(double(n)), 1e-14));
            CHECK_THAT(p.budget_residual, WithinAbs(0.0, 1e-15));
            CHECK(p.band_ok);
        }
    }
    SECTION("weights at their floors") {
        const BandSpec b({{"A", 0.1, 0.5, ""}, {"B", 0.3, 0.6, ""}});
        const MarketInputs in(Vector::Zero(2), Matrix::Identity(2, 2), Period::Yearly);
        const auto p = evaluate(Vector{{0.1, 0.3}}, in, ModelConfig{}, b);
        CHECK_THAT(p.budget_residual, WithinAbs(-0.6, 1e-15));
        CHECK(p.band_ok);
        CHECK_FALSE(evaluate(Vector{{0.05, 0.3}}, in, ModelConfig{}, b).band_ok);
    }
    SECTION("random instances against the triple loop") {
        Rng rng(6);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 1 + rng.below(8);
            const auto in = testing::random_inputs(rng, n);
            ModelConfig cfg;
            cfg.sigma_target = 0.2;
            Vector w(n);
            for (std::size_t i = 0; i < n; ++i) w(i) = rng.uniform();
            double ret = 0.0, var = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                ret += in.mu()(i) * w(i);
                for (std::size_t j = 0; j < n; ++j) var += w(i) * in.sigma()(i, j) * w(j);
            }
            const auto p = evaluate(w, in, cfg, free_bands(testing::asset_names(n)));
            CHECK_THAT(p.expected_return, WithinAbs(ret, 1e-12));
            CHECK_THAT(p.volatility * p.volatility, WithinAbs(var, 1e-12));
            CHECK_THAT(p.vol_gap, WithinAbs(std::sqrt(var) - 0.2, 1e-12));
            CHECK(p.volatility >= 0.0);
        }
    }
    SECTION("dimension mismatch") {
        const MarketInputs in(Vector::Zero(2), Matrix::Identity(2, 2), Period::Yearly);
        CHECK(kind_of([&] { evaluate(Vector::Zero(3), in, ModelConfig{}, free_bands({"a", "b"})); }) ==
              ErrorKind::Dimension);
    }
}

TEST_CASE("random clouds", "[evaluator]") {
    Rng rng(12);
    const auto in = testing::random_inputs(rng, 5);
    const BandSpec b({{"A", 0.0, 0.4, ""}, {"B", 0.1, 0.3, ""}, {"C", 0.0, 0.25, ""}, {"D", 0.05, 0.5, ""},
                      {"E", 0.0, 0.1, ""}});
    const auto spec = make_encoding(b, 100);

    SECTION("every sample is feasible") {
        const auto cloud = random_cloud(1000, b, spec, in, ModelConfig{}, 3);
        REQUIRE(cloud.size() == 1000);
        for (const auto& p : cloud) {
            CHECK(p.band_ok);
            CHECK(std::abs(p.budget_residual) <= 0.01 + 1e-12);
        }
    }
    SECTION("deterministic per seed") {
        const auto a = random_cloud(50, b, spec, in, ModelConfig{}, 9);
        const auto c = random_cloud(50, b, spec, in, ModelConfig{}, 9);
        const auto d = random_cloud(50, b, spec, in, ModelConfig{}, 10);
        bool differs = false;
        for (std::size_t i = 0; i < 50; ++i) {
            CHECK(a[i].weights == c[i].weights);
            differs = differs || a[i].weights != d[i].weights;
        }
        CHECK(differs);
        // A longer cloud starts with the shorter one.
        const auto longer = random_cloud(80, b, spec, in, ModelConfig{}, 9);
        for (std::size_t i = 0; i < 50; ++i) CHECK(longer[i].weights == a[i].weights);
    }
    SECTION("pinned bands give one point") {
        const BandSpec pinned({{"A", 0.25, 0.25, ""}, {"B", 0.75, 0.75, ""}});
        const auto s = make_encoding(pinned, 100);
        const auto small = testing::random_inputs(rng, 2);
        const auto cloud = random_cloud(20, pinned, s, small, ModelConfig{}, 1);
        for (const auto& p : cloud) CHECK(p.weights == Vector{{0.25, 0.75}});
    }
    SECTION("unreachable budget") {
        const BandSpec tight({{"A", 0.0, 0.3, ""}, {"B", 0.0, 0.3, ""}});
        const auto s = make_encoding(tight, 100);
        const auto small = testing::random_inputs(rng, 2);
        CHECK(kind_of([&] { random_cloud(5, tight, s, small, ModelConfig{}, 1); }) == ErrorKind::Infeasible);
    }
}

TEST_CASE("equal-weight index", "[evaluator]") {
    CHECK_THAT(ewi_return(two_dates({10, 20, 5}, {11, 22, 5.5}), 0, 1), WithinAbs(0.10, 1e-15));
    CHECK_THAT(ewi_return(two_dates({10, 10}, {12, 8}), 0, 1), WithinAbs(0.0, 1e-15));

    SyntheticMarketSpec spec;
    spec.assets = 5;
    spec.days = 30;
    const auto m = synthesize_market(spec, 4);
    const Matrix& p = m.prices.prices();
    double hold = 0.0;
    for (int n = 0; n < 5; ++n) hold += p(20, n) / p(3, n);
    CHECK_THAT(ewi_return(m.prices, 3, 20), WithinAbs(hold / 5.0 - 1.0, 1e-14));

    double growth = 1.0;
    for (int t = 3; t < 20; ++t) {
        double r = 0.0;
        for (int n = 0; n < 5; ++n) r += p(t + 1, n) / p(t, n);
        growth *= r / 5.0;
    }
    CHECK_THAT(ewi_return(m.prices, 3, 20, EwiMode::Rebalanced), WithinAbs(growth - 1.0, 1e-14));
    CHECK(ewi_return(m.prices, 7, 7) == 0.0);
    CHECK(kind_of([&] { ewi_return(m.prices, 3, 30); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { ewi_return(m.prices, 5, 4); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("synthetic markets", "[evaluator]") {
    SyntheticMarketSpec spec;
    spec.assets = 6;
    spec.sectors = 3;
    spec.days = 40;
    spec.dominant_drift = 0.01;
    const auto a = synthesize_market(spec, 5);
    const auto b = synthesize_market(spec, 5);
    CHECK(a.prices.prices() == b.prices.prices());
    CHECK(a.prices.num_dates() == 40);
    CHECK(a.prices.assets()[0] == "A000");
    CHECK(a.sectors == std::vector<std::string>{"S0", "S1", "S2", "S0", "S1", "S2"});
    CHECK(format_date(a.prices.dates()[0]) == "2020-04-23");
    CHECK(format_date(a.prices.dates()[2]) == "2020-04-27");  // weekend skipped
    CHECK(synthesize_market(spec, 6).prices.prices() != a.prices.prices());
}
