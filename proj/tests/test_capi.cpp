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
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <catch_amalgamated.hpp>

#include "bandqubo/bandqubo.h"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

struct Fixture {
    bq_market* market = nullptr;
    bq_bands* bands = nullptr;
    bq_encoding* encoding = nullptr;

    Fixture() {
        const double mu[3] = {0.08, 0.12, 0.05};
        const double sigma[9] = {0.04, 0.01, 0.0, 0.01, 0.09, 0.02, 0.0, 0.02, 0.0225};
        const double lo[3] = {0.1, 0.0, 0.2};
        const double hi[3] = {0.4, 0.5, 0.3};
        REQUIRE(bq_market_create(3, mu, sigma, 1, &market) == BQ_OK);
        REQUIRE(bq_bands_create(3, lo, hi, &bands) == BQ_OK);
        REQUIRE(bq_encoding_create(bands, 20, -1, &encoding) == BQ_OK);
    }
    ~Fixture() {
        bq_encoding_free(encoding);
        bq_bands_free(bands);
        bq_market_free(market);
    }
};

bq_model full_model() {
    bq_model m{};
    m.gamma = 1.0;
    m.rho = 2.0;
    m.lambda_vol = 50.0;
    m.sigma_target = 0.15;
    m.k_weights = nullptr;
    m.vol_constraint = 1;
    return m;
}

}  // namespace

TEST_CASE("status codes and messages", "[capi]") {
    CHECK(std::string(bq_version()).size() > 0);
    CHECK(std::string(bq_status_string(BQ_ERR_INFEASIBLE)) == "infeasible");
    CHECK(std::string(bq_status_string(static_cast<bq_status>(99))) == "unknown status");

    bq_market* m = nullptr;
    CHECK(bq_market_create(2, nullptr, nullptr, 0, &m) == BQ_ERR_INVALID_ARGUMENT);
    const double mu[2] = {0.0, 0.0};
    const double bad[4] = {1.0, 2.0, 2.0, 1.0};
    CHECK(bq_market_create(2, mu, bad, 0, &m) == BQ_ERR_VALIDATION);
    CHECK_THAT(bq_last_error(), ContainsSubstring("semidefinite"));
    CHECK(m == nullptr);

    const double lo[1] = {0.5};
    const double hi[1] = {0.2};
    bq_bands* b = nullptr;
    CHECK(bq_bands_create(1, lo, hi, &b) == BQ_ERR_VALIDATION);

    const double lo2[1] = {0.0};
    const double hi2[1] = {0.105};
    REQUIRE(bq_bands_create(1, lo2, hi2, &b) == BQ_OK);
    CHECK_FALSE(bq_bands_feasible(b));
    bq_encoding* e = nullptr;
    CHECK(bq_encoding_create(b, 100, -1, &e) == BQ_ERR_ENCODING);
    bq_bands_free(b);

    CHECK(bq_market_from_csv("/nonexistent/prices.csv", 10, -1, 0, &m) == BQ_ERR_IO);
    CHECK_THAT(bq_last_error(), ContainsSubstring("/nonexistent/prices.csv"));

    // Releasing null handles is harmless.
    bq_market_free(nullptr);
    bq_qubo_free(nullptr);
    bq_string_free(nullptr);
}

TEST_CASE("market handles", "[capi]") {
    Fixture f;
    CHECK(bq_market_num_assets(f.market) == 3);
    CHECK(bq_market_is_yearly(f.market));
    double mu[3];
    CHECK(bq_market_mu(f.market, mu, 3) == BQ_OK);
    CHECK(mu[1] == 0.12);
    double sigma[9];
    CHECK(bq_market_sigma(f.market, sigma, 8) == BQ_ERR_DIMENSION);
    CHECK(bq_market_sigma(f.market, sigma, 9) == BQ_OK);
    CHECK(sigma[5] == 0.02);

    const double dmu[1] = {0.001};
    const double dsig[1] = {0.0001};
    bq_market* daily = nullptr;
    REQUIRE(bq_market_create(1, dmu, dsig, 0, &daily) == BQ_OK);
    bq_market* yearly = nullptr;
    REQUIRE(bq_market_annualize(daily, 252, &yearly) == BQ_OK);
    CHECK(bq_market_mu(yearly, mu, 1) == BQ_OK);
    CHECK_THAT(mu[0], WithinAbs(0.252, 1e-15));
    bq_market_free(yearly);
    bq_market_free(daily);

    const auto path = std::filesystem::temp_directory_path() / "bandqubo_capi_prices.csv";
    std::ofstream(path) << "date,A,B\n2021-01-04,10,20\n2021-01-05,11,19\n2021-01-06,12,21\n2021-01-07,11,20\n";
    bq_market* loaded = nullptr;
    REQUIRE(bq_market_from_csv(path.c_str(), 3, -1, 0, &loaded) == BQ_OK);
    CHECK(bq_market_num_assets(loaded) == 2);
    CHECK_FALSE(bq_market_is_yearly(loaded));
    bq_market_free(loaded);
    CHECK(bq_market_from_csv(path.c_str(), 4, -1, 0, &loaded) == BQ_ERR_INSUFFICIENT_DATA);
    std::filesystem::remove(path);
}

TEST_CASE("encoding handles", "[capi]") {
    Fixture f;
    CHECK(bq_bands_feasible(f.bands));
    // Widths 6, 10 and 2 units.
    CHECK(bq_encoding_total_bits(f.encoding) == 3 + 4 + 2);
    int depth = 0;
    int64_t residual = 0;
    size_t offset = 0;
    CHECK(bq_encoding_asset(f.encoding, 1, &depth, &residual, &offset) == BQ_OK);
    CHECK(depth == 3);
    CHECK(residual == 3);
    CHECK(offset == 3);
    CHECK(bq_encoding_asset(f.encoding, 3, &depth, &residual, &offset) == BQ_ERR_INVALID_ARGUMENT);

    std::vector<uint8_t> ones(9, 1);
    double w[3];
    CHECK(bq_decode(f.encoding, f.bands, ones.data(), ones.size(), w, 3) == BQ_OK);
    CHECK_THAT(w[0], WithinAbs(0.4, 1e-15));
    CHECK_THAT(w[1], WithinAbs(0.5, 1e-15));
    CHECK_THAT(w[2], WithinAbs(0.3, 1e-15));
    CHECK(bq_decode(f.encoding, f.bands, ones.data(), 8, w, 3) == BQ_ERR_DIMENSION);

    const double target[3] = {0.25, 0.45, 0.2};
    std::vector<uint8_t> bits(9);
    CHECK(bq_encode_nearest(f.encoding, f.bands, target, 3, bits.data(), bits.size()) == BQ_OK);
    CHECK(bq_decode(f.encoding, f.bands, bits.data(), bits.size(), w, 3) == BQ_OK);
    CHECK_THAT(w[0], WithinAbs(0.25, 1e-15));
    CHECK_THAT(w[1], WithinAbs(0.45, 1e-15));
    const double outside[3] = {0.5, 0.45, 0.2};
    CHECK(bq_encode_nearest(f.encoding, f.bands, outside, 3, bits.data(), bits.size()) == BQ_ERR_VALIDATION);
}

TEST_CASE("model, QUBO and solvers", "[capi]") {
    Fixture f;
    const bq_model model = full_model();
    bq_qubo* q = nullptr;
    REQUIRE(bq_qubo_build(f.market, &model, f.encoding, f.bands, &q) == BQ_OK);
    REQUIRE(bq_qubo_num_bits(q) == 9);

    double a = 0.0, b = 0.0;
    CHECK(bq_qubo_coefficient(q, 2, 5, &a) == BQ_OK);
    CHECK(bq_qubo_coefficient(q, 5, 2, &b) == BQ_OK);
    CHECK(a == b);
    CHECK(bq_qubo_coefficient(q, 9, 0, &a) == BQ_ERR_INVALID_ARGUMENT);

    const uint8_t x[9] = {1, 0, 1, 1, 1, 0, 0, 0, 1};
    double energy = 0.0, direct = 0.0, w[3];
    CHECK(bq_qubo_energy(q, x, 9, &energy) == BQ_OK);
    CHECK(bq_decode(f.encoding, f.bands, x, 9, w, 3) == BQ_OK);
    CHECK(bq_cost_direct(f.market, &model, w, 3, &direct) == BQ_OK);
    CHECK_THAT(energy, WithinAbs(direct, 1e-9 * (1.0 + std::abs(bq_qubo_offset(q)))));

    const auto path = std::filesystem::temp_directory_path() / "bandqubo_capi_qubo.txt";
    CHECK(bq_qubo_write(q, path.c_str()) == BQ_OK);
    bq_qubo* back = nullptr;
    REQUIRE(bq_qubo_read(path.c_str(), &back) == BQ_OK);
    double again = 0.0;
    CHECK(bq_qubo_energy(back, x, 9, &again) == BQ_OK);
    CHECK_THAT(again, WithinAbs(energy, 1e-12));
    bq_qubo_free(back);
    std::filesystem::remove(path);

    bq_solution* exact = nullptr;
    REQUIRE(bq_exhaustive(q, 24, &exact) == BQ_OK);
    bq_solution* refused = nullptr;
    CHECK(bq_exhaustive(q, 8, &refused) == BQ_ERR_SOLVER_REFUSED);
    CHECK(refused == nullptr);

    bq_schedule s{};
    CHECK(bq_default_schedule(q, 3, &s) == BQ_OK);
    CHECK(s.sweeps == 1800);
    CHECK(s.seed == 3);
    bq_solution* first = nullptr;
    bq_solution* second = nullptr;
    REQUIRE(bq_anneal(q, &s, 1, &first) == BQ_OK);
    REQUIRE(bq_anneal(q, &s, 4, &second) == BQ_OK);
    CHECK(bq_solution_energy(first) == bq_solution_energy(second));
    CHECK_THAT(bq_solution_energy(first), WithinAbs(bq_solution_energy(exact), 1e-9));
    std::vector<uint8_t> sb(bq_solution_num_bits(first)), eb(9);
    CHECK(bq_solution_bits(first, sb.data(), sb.size()) == BQ_OK);
    CHECK(bq_solution_bits(exact, eb.data(), 3) == BQ_ERR_DIMENSION);
    size_t replica = 99, sweep = 99;
    bq_solution_provenance(first, &replica, &sweep);
    CHECK(replica < s.replicas);
    CHECK(sweep < s.sweeps);
    s.t_end = 2.0 * s.t_start;
    bq_solution* invalid = nullptr;
    CHECK(bq_anneal(q, &s, 1, &invalid) == BQ_ERR_INVALID_ARGUMENT);

    CHECK(bq_decode(f.encoding, f.bands, sb.data(), sb.size(), w, 3) == BQ_OK);
    bq_portfolio_metrics metrics{};
    CHECK(bq_evaluate(f.market, &model, f.bands, w, 3, &metrics) == BQ_OK);
    CHECK(metrics.band_ok == 1);
    CHECK(metrics.volatility > 0.0);
    CHECK_THAT(metrics.vol_gap, WithinAbs(metrics.volatility - 0.15, 1e-15));

    bq_solution_free(first);
    bq_solution_free(second);
    bq_solution_free(exact);
    bq_qubo_free(q);
}

TEST_CASE("config-driven runs", "[capi]") {
    const auto dir = std::filesystem::temp_directory_path() / "bandqubo_capi_run";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "run.cfg") << "K = 20\ndefault_w_max = 0.5\ntargets = 0.01\ncloud_count = 20\n"
                                      "[synthetic]\nassets = 4\ndays = 90\n";
    bq_run* run = nullptr;
    REQUIRE(bq_run_load((dir / "run.cfg").c_str(), &run) == BQ_OK);
    CHECK(bq_run_set_seed(run, 5) == BQ_OK);
    CHECK(bq_run_set_output_dir(run, (dir / "out").c_str()) == BQ_OK);
    CHECK(bq_run_execute(run, "solve") == BQ_OK);
    CHECK(std::filesystem::exists(dir / "out" / "composition.csv"));
    CHECK(bq_run_execute(run, "frontier") == BQ_OK);
    CHECK(std::filesystem::exists(dir / "out" / "frontier.csv"));
    CHECK(bq_run_execute(run, "validate") == BQ_ERR_INVALID_ARGUMENT);
    CHECK(bq_run_execute(run, "dance") == BQ_ERR_INVALID_ARGUMENT);
    bq_run_free(run);

    char* report = nullptr;
    size_t errors = 99;
    REQUIRE(bq_validate_config((dir / "run.cfg").c_str(), &report, &errors) == BQ_OK);
    CHECK(errors == 0);
    CHECK_THAT(report, ContainsSubstring("errors=0"));
    bq_string_free(report);

    std::ofstream(dir / "heavy.cfg") << "K = 20\ndefault_w_min = 0.5\n[synthetic]\nassets = 4\n";
    REQUIRE(bq_validate_config((dir / "heavy.cfg").c_str(), &report, &errors) == BQ_OK);
    CHECK(errors >= 1);
    CHECK_THAT(report, ContainsSubstring("FEASIBILITY"));
    bq_string_free(report);

    CHECK(bq_run_load((dir / "missing.cfg").c_str(), &run) == BQ_ERR_IO);
}
