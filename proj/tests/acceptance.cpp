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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "bandqubo/config.hpp"
#include "bandqubo/encoding.hpp"
#include "bandqubo/experiments.hpp"
#include "bandqubo/qubo.hpp"
#include "bandqubo/rng.hpp"
#include "bandqubo/solver.hpp"
#include "test_support.hpp"

using namespace bandqubo;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

const fs::path kOut = fs::current_path() / "acceptance_out";

RunConfig config_from(const std::string& text, const fs::path& out) {
    std::istringstream in(text);
    RunConfig cfg = parse_run_config(in, kOut);
    cfg.out_dir = out;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Random yearly instance with every term of the cost switched on. Odd
// trials use the default multipliers, whose scale follows K.
struct Instance {
    MarketInputs inputs;
    BandSpec bands;
    EncodingSpec spec;
    ModelConfig model;
};

Instance make_instance(Rng& rng, std::size_t max_assets, std::size_t max_bits, bool defaults) {
    const std::size_t n = 1 + rng.below(max_assets);
    const int k = 10 + static_cast<int>(rng.below(191));
    auto inputs = testing::random_inputs(rng, n);
    auto bands = testing::random_bands(rng, n, k, max_bits);
    auto spec = make_encoding(bands, k);
    ModelConfig model = testing::random_model(rng, inputs);
    if (defaults) {
        model.rho = default_rho(inputs, model.gamma, k);
        model.lambda_vol = default_lambda_vol(model.rho, model.sigma_target);
        model.k_weights = default_linear_weights(n);
    }
    return {std::move(inputs), std::move(bands), std::move(spec), std::move(model)};
}

Verdict qubo_fidelity() {
    Rng rng(101);
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto inst = make_instance(rng, 8, 30, trial % 2 == 1);
        const auto q = build_qubo(inst.inputs, inst.model, inst.spec, inst.bands);
        const double tol = 1e-9 * (1.0 + std::abs(q.offset()));
        for (int draw = 0; draw < 1000; ++draw) {
            const Bits x = testing::random_bits(rng, inst.spec.total_bits());
            const double err = std::abs(q.energy(x) - cost_direct(decode(x, inst.spec, inst.bands), inst.inputs, inst.model));
            worst_ratio = std::max(worst_ratio, err / tol);
        }
    }
    return {worst_ratio <= 1.0, fmt::format("worst |E - H| / (1e-9 (1 + |offset|)) = {:.3g} over 50 x 1000", worst_ratio)};
}

Verdict band_hardness() {
    Rng rng(202);
    std::size_t violations = 0, decodes = 0;
    for (int spec_id = 0; spec_id < 100; ++spec_id) {
        const std::size_t n = 1 + rng.below(10);
        const int k = 10 + static_cast<int>(rng.below(500));
        const auto bands = testing::random_bands(rng, n, k, 200, k);
        const auto spec = make_encoding(bands, k);
        for (int draw = 0; draw < 1000; ++draw, ++decodes) {
            const Vector w = decode(testing::random_bits(rng, spec.total_bits()), spec, bands);
            for (std::size_t i = 0; i < n; ++i) {
                if (!(w(i) >= bands[i].w_min && w(i) <= bands[i].w_max)) ++violations;
            }
        }
    }
    return {violations == 0, fmt::format("{} violations in {} decodes over 100 band specs", violations, decodes)};
}

Verdict surjectivity() {
    std::size_t bad = 0;
    for (std::int64_t delta = 0; delta <= 64; ++delta) {
        for (int k : {64, 100, 128}) {
            const BandSpec bands({{"A", 0.0, static_cast<double>(delta) / k, ""}});
            const auto spec = make_encoding(bands, k);
            std::set<double> seen;
            const std::size_t b = spec.total_bits();
            for (std::uint64_t idx = 0; idx < (1ULL << b); ++idx) {
                Bits x(b);
                for (std::size_t i = 0; i < b; ++i) x[i] = (idx >> i) & 1;
                seen.insert(decode(x, spec, bands)(0));
            }
            std::set<double> grid;
            for (std::int64_t u = 0; u <= delta; ++u) grid.insert(static_cast<double>(u) / k);
            if (seen != grid) ++bad;
        }
    }
    return {bad == 0, fmt::format("{} of 195 (delta, K) pairs with delta <= 64 differ from the grid", bad)};
}

Verdict solver_quality() {
    Rng rng(303);
    int worst_hits = 100;
    double worst_gap = 0.0;
    std::size_t instances_below = 0;
    for (int trial = 0; trial < 30; ++trial) {
        Instance inst = make_instance(rng, 5, 20, trial % 2 == 1);
        while (inst.spec.total_bits() < 12) inst = make_instance(rng, 5, 20, trial % 2 == 1);
        const auto q = build_qubo(inst.inputs, inst.model, inst.spec, inst.bands);
        const auto exact = exhaustive_solve(q);
        const double tol = 1e-9 * (1.0 + std::abs(exact.energy));
        int hits = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto got = anneal(q, default_schedule(q, seed));
            if (got.energy <= exact.energy + tol) {
                ++hits;
            } else {
                worst_gap = std::max(worst_gap, (got.energy - exact.energy) / std::abs(exact.energy));
            }
        }
        worst_hits = std::min(worst_hits, hits);
        if (hits < 90) ++instances_below;
    }
    return {instances_below == 0 && worst_gap <= 1e-3,
            fmt::format("worst instance {}/100 seeds at the optimum, {} instances below 90, worst miss {:.3g} relative",
                        worst_hits, instances_below, worst_gap)};
}

const char* kSweepConfig = R"(period = yearly
window = 63
K = 100
gamma = 1
sigma_target = 0.10
vol_constraint = true
default_w_max = 0.3
seed = 7
[synthetic]
assets = 10
sectors = 2
)";

Verdict sweep_shape() {
    const auto cfg = config_from(kSweepConfig, kOut / "sweep");
    const auto sweep = run_sweep(cfg);
    const double at = sweep.points[sweep.best].realized_vol;
    const auto run = prepare_run(cfg);
    const auto opt = optimize(run, cfg, model_for(cfg, run.inputs, cfg.gamma, true, cfg.sigma_target));
    const double vol = opt.portfolio.volatility;
    const bool pass = std::abs(at - 0.10) <= sweep.grid_step && std::abs(vol - 0.10) <= 0.01;
    return {pass, fmt::format("curve minimum at {:.4f} (step {:.3f}), constrained optimum vol {:.4f}, budget residual {:.3g}",
                              at, sweep.grid_step, vol, opt.portfolio.budget_residual)};
}

Verdict budget_penalty() {
    Rng rng(404);
    const int k = 100;
    double worst = 0.0;
    std::size_t rises = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.below(3);
        BandSpec bands = testing::random_bands(rng, n, k, 16);
        while (!bands.budget_feasible()) bands = testing::random_bands(rng, n, k, 16);
        const auto spec = make_encoding(bands, k);
        const auto inputs = testing::random_inputs(rng, n);
        ModelConfig model;
        model.gamma = 0.5 + rng.uniform();
        const double rho0 = default_rho(inputs, model.gamma, k);
        double previous = std::numeric_limits<double>::infinity();
        for (double scale : {0.01, 0.1, 1.0, 10.0}) {
            model.rho = scale * rho0;
            const auto sol = exhaustive_solve(build_qubo(inputs, model, spec, bands), 16);
            const double residual = std::abs(decode(sol.bits, spec, bands).sum() - 1.0);
            if (scale == 1.0) worst = std::max(worst, residual);
            if (residual > previous + 1e-12) ++rises;
            previous = residual;
        }
    }
    return {worst <= 1.5 / k && rises == 0,
            fmt::format("worst |sum w - 1| at default rho {:.3g} (limit {:.3g}), {} increases along the ladder", worst,
                        1.5 / k, rises)};
}

const char* kDominanceConfig = R"(period = daily
window = 63
K = 100
gamma = 1
targets = 0.005, 0.0075, 0.01
cloud_count = 4000
default_w_max = 0.5
refine_iterations = 4
seed = 3
[synthetic]
assets = 8
sectors = 2
market_vol = 0.010
sector_vol = 0.002
beta_min = 0.1
beta_max = 2.5
idio_vol_min = 0.002
idio_vol_max = 0.008
dominant_drift = 0.003
)";

Verdict dominance() {
    const auto result = run_frontier(config_from(kDominanceConfig, kOut / "frontier_a"));
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < result.optima.size(); ++i) {
        const auto& p = result.optima[i].portfolio;
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& c : result.cloud) {
            if (std::abs(c.volatility - p.volatility) <= 0.001) {
                sum += c.expected_return;
                ++count;
            }
        }
        const double mean = count ? sum / count : std::numeric_limits<double>::quiet_NaN();
        const bool ok = count > 0 && p.expected_return >= mean;
        pass = pass && ok;
        detail += fmt::format("{}{}: vol {:.4f} return {:.3g} vs bucket mean {:.3g} (n={})", i ? "; " : "",
                              result.rows[i].label, p.volatility, p.expected_return, mean, count);
    }
    return {pass, detail};
}

Verdict determinism() {
    // Reuses the first frontier run of the dominance check.
    const auto a = kOut / "frontier_a";
    if (!fs::exists(a / "frontier.csv")) run_frontier(config_from(kDominanceConfig, a));
    const auto b = kOut / "frontier_b";
    run_frontier(config_from(kDominanceConfig, b));
    std::size_t files = 0, differing = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        ++files;
        if (slurp(entry.path()) != slurp(b / entry.path().filename())) ++differing;
    }
    return {files > 0 && differing == 0, fmt::format("{} of {} output files differ", differing, files)};
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Verdict()> check;
};

}  // namespace

int main() {
    fs::remove_all(kOut);
    fs::create_directories(kOut);

    const std::vector<Criterion> criteria = {
        {1, "qubo_fidelity", 10.0, qubo_fidelity},
        {2, "band_hardness", 5.0, band_hardness},
        {3, "encoding_surjectivity", 5.0, surjectivity},
        {4, "solver_quality", 120.0, solver_quality},
        {5, "sweep_minimum_at_target", 60.0, sweep_shape},
        {6, "budget_penalty", 60.0, budget_penalty},
        {7, "frontier_dominance", 120.0, dominance},
        {8, "frontier_determinism", std::numeric_limits<double>::infinity(), determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = Clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        const bool in_time = secs <= c.limit_seconds;
        const bool pass = v.pass && in_time;
        if (!pass) ++failures;
        const std::string limit = std::isfinite(c.limit_seconds) ? fmt::format(" (limit {:g}s)", c.limit_seconds) : "";
        std::printf("%s %d %s: %s; %.2fs%s\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs,
                    limit.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
