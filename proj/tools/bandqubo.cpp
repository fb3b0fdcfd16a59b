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

// bandqubo command-line front end. Talks to the library only through the
// C interface in bandqubo/bandqubo.h.
//
// Exit codes: 0 success, 1 usage / input / other errors, 2 infeasible bands,
// 3 solver refused the instance.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bandqubo/bandqubo.h"

namespace {

int exit_code(bq_status status) {
    switch (status) {
        case BQ_OK: return 0;
        case BQ_ERR_INFEASIBLE: return 2;
        case BQ_ERR_SOLVER_REFUSED: return 3;
        default: return 1;
    }
}

int report(bq_status status) {
    if (status != BQ_OK) std::cerr << "bandqubo: " << bq_status_string(status) << ": " << bq_last_error() << '\n';
    return exit_code(status);
}

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

int run_experiment(const std::string& experiment, const RunOptions& opts) {
    bq_run* run = nullptr;
    if (const auto s = bq_run_load(opts.config.c_str(), &run); s != BQ_OK) return report(s);
    bq_status status = BQ_OK;
    if (opts.seed) status = bq_run_set_seed(run, *opts.seed);
    if (status == BQ_OK && opts.out) status = bq_run_set_output_dir(run, opts.out->c_str());
    if (status == BQ_OK) status = bq_run_execute(run, experiment.c_str());
    bq_run_free(run);
    return report(status);
}

int run_validate(const RunOptions& opts) {
    char* text = nullptr;
    std::size_t errors = 0;
    if (const auto s = bq_validate_config(opts.config.c_str(), &text, &errors); s != BQ_OK) return report(s);
    std::cout << text;
    bq_string_free(text);
    return errors == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Banded portfolio optimization compiled to QUBO and solved by simulated annealing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(bq_version()));

    RunOptions opts;
    std::uint64_t seed = 0;
    std::string out;
    for (const char* name : {"solve", "sweep", "frontier", "cloud", "validate"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opts.config, "Run configuration file")->required();
        if (std::string(name) != "validate") {
            sub->add_option("--seed", seed, "Override the solver seed");
            sub->add_option("--out", out, "Override the output directory");
        }
    }
    app.get_subcommand("solve")->description("Optimize one portfolio and write composition.csv");
    app.get_subcommand("sweep")->description("Volatility-penalty sweep over risk aversion; writes sweep.csv");
    app.get_subcommand("frontier")->description("Target-volatility optima, random cloud and EWI; writes frontier.csv");
    app.get_subcommand("cloud")->description("Random feasible portfolios and EWI; writes frontier.csv");
    app.get_subcommand("validate")->description("Report feasibility, encoding and scale problems");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    auto* sub = app.get_subcommands().front();
    if (sub->get_name() == "validate") return run_validate(opts);
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--out")) opts.out = out;
    return run_experiment(sub->get_name(), opts);
}
