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

#include "bandqubo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "bandqubo/error.hpp"
#include "bandqubo/rng.hpp"
#include "bandqubo/synthetic.hpp"
#include "log.hpp"

namespace bandqubo {

namespace {

std::string num(double v) { return fmt::format("{:.12g}", v); }

std::ofstream open_output(const RunConfig& cfg, const char* name) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) fail(ErrorKind::Io, fmt::format("cannot create output directory '{}'", cfg.out_dir.string()));
    const auto path = cfg.out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, fmt::format("cannot write '{}'", path.string()));
    return out;
}

Solution solve_qubo(const Qubo& qubo, const RunConfig& cfg) {
    if (cfg.solver == SolverKind::Exhaustive) return exhaustive_solve(qubo, cfg.exhaustive_cap);
    auto schedule = default_schedule(qubo, cfg.seed);
    if (cfg.t_start) schedule.t_start = *cfg.t_start;
    if (cfg.t_end) schedule.t_end = *cfg.t_end;
    if (cfg.sweeps) schedule.sweeps = *cfg.sweeps;
    if (cfg.replicas) schedule.replicas = *cfg.replicas;
    AnnealOptions options;
    options.threads = cfg.threads;
    return anneal(qubo, schedule, options);
}

const char* risk_label(std::size_t i, std::size_t count) {
    static const char* three[] = {"optimal_low", "optimal_medium", "optimal_high"};
    return count == 3 ? three[i] : nullptr;
}

/// EWI over the estimation window, expressed like mu'w: mean log return per
/// period, scaled to a year when the run is yearly.
FrontierRow ewi_row(const PreparedRun& run, const RunConfig& cfg) {
    const double total = ewi_return(run.series, run.window_start, run.as_of, cfg.ewi);
    double per_period = std::log1p(total) / static_cast<double>(run.as_of - run.window_start);
    if (cfg.period == Period::Yearly) per_period *= static_cast<double>(cfg.periods_per_year);
    const auto n = static_cast<Eigen::Index>(run.inputs.num_assets());
    const Vector equal = Vector::Constant(n, 1.0 / static_cast<double>(n));
    const double vol = std::sqrt(std::max(0.0, equal.dot(run.inputs.sigma() * equal)));
    return FrontierRow{vol, per_period, "ewi"};
}

std::vector<Portfolio> make_cloud(const PreparedRun& run, const RunConfig& cfg, std::size_t count) {
    const ModelConfig model = model_for(cfg, run.inputs, cfg.gamma, false, cfg.sigma_target);
    const std::uint64_t seed = splitmix64(cfg.seed ^ 0x636c6f7564ULL);
    if (cfg.cloud_bands == CloudBandsMode::Free) {
        const BandSpec free = free_bands(run.series.assets());
        const auto spec = make_encoding(free, cfg.units, cfg.grid);
        return random_cloud(count, free, spec, run.inputs, model, seed);
    }
    run.bands.require_budget_feasible();
    const auto spec = make_encoding(run.bands, cfg.units, cfg.grid, cfg.bit_depth);
    return random_cloud(count, run.bands, spec, run.inputs, model, seed);
}

void write_frontier(const RunConfig& cfg, const FrontierResult& result) {
    auto out = open_output(cfg, "frontier.csv");
    out << "volatility,return,label\n";
    for (const auto& r : result.rows) out << num(r.volatility) << ',' << num(r.expected_return) << ',' << r.label << '\n';
}

void write_model_summary(std::ostream& out, const ModelConfig& m) {
    out << "gamma=" << num(m.gamma) << '\n'
        << "rho=" << num(m.rho) << '\n'
        << "lambda_vol=" << num(m.lambda_vol) << '\n'
        << "sigma_target=" << num(m.sigma_target) << '\n'
        << "vol_constraint=" << (m.vol_constraint ? "true" : "false") << '\n';
}

}  // namespace

PreparedRun prepare_run(const RunConfig& cfg) {
    std::optional<PriceSeries> series;
    std::vector<std::string> sectors;
    if (cfg.synthetic) {
        auto market = synthesize_market(*cfg.synthetic, cfg.synthetic_seed);
        series.emplace(std::move(market.prices));
        sectors = std::move(market.sectors);
    } else {
        series.emplace(load_prices(*cfg.data, cfg.csv));
    }
    const std::size_t as_of = cfg.as_of ? series->index_at_or_before(*cfg.as_of) : series->num_dates() - 1;
    if (as_of < cfg.window) {
        fail(ErrorKind::InsufficientData,
             fmt::format("window of {} returns needs {} prices before {}, only {} available", cfg.window,
                         cfg.window + 1, format_date(series->dates()[as_of]), as_of + 1));
    }
    const Matrix returns = log_returns(*series);
    MarketInputs inputs = estimate_inputs(returns, cfg.window, as_of);
    if (cfg.period == Period::Yearly) inputs = annualize(inputs, cfg.periods_per_year);
    BandSpec bands = resolve_bands(cfg, series->assets(), sectors);
    return PreparedRun{std::move(*series), std::move(sectors), std::move(inputs), std::move(bands), as_of,
                       as_of - cfg.window};
}

ModelConfig model_for(const RunConfig& cfg, const MarketInputs& inputs, double gamma, bool vol_constraint,
                      double sigma_target) {
    ModelConfig m;
    m.gamma = gamma;
    m.rho = cfg.rho ? *cfg.rho : default_rho(inputs, gamma, cfg.units);
    m.sigma_target = sigma_target;
    m.vol_constraint = vol_constraint;
    if (vol_constraint) {
        if (!(sigma_target > 0.0)) fail(ErrorKind::InvalidArgument, "the volatility constraint needs sigma_target > 0");
        m.lambda_vol = cfg.lambda_vol ? *cfg.lambda_vol : default_lambda_vol(m.rho, sigma_target);
        m.k_weights = default_linear_weights(inputs.num_assets());
    }
    return m;
}

SolveResult optimize(const PreparedRun& run, const RunConfig& cfg, ModelConfig model) {
    run.bands.require_budget_feasible();
    const auto spec = make_encoding(run.bands, cfg.units, cfg.grid, cfg.bit_depth);
    if (model.vol_constraint && model.k_weights.size() == 0) {
        model.k_weights = default_linear_weights(run.inputs.num_assets());
    }

    SolveResult result;
    result.bits = spec.total_bits();
    if (result.bits == 0) {
        const Vector w = decode(Bits{}, spec, run.bands);
        result.pinned = true;
        result.direct_cost = cost_direct(w, run.inputs, model);
        result.solution.energy = result.direct_cost;
        result.portfolio = evaluate(w, run.inputs, model, run.bands);
        result.model = std::move(model);
        return result;
    }

    for (std::size_t it = 0;; ++it) {
        Qubo qubo = build_qubo(run.inputs, model, spec, run.bands);
        Solution solution = solve_qubo(qubo, cfg);
        const Vector w = decode(solution.bits, spec, run.bands);
        log().debug("iteration {}: energy {:.12g}", it, solution.energy);
        if (it >= cfg.refine_iterations || !model.vol_constraint) {
            result.direct_cost = cost_direct(w, run.inputs, model);
            result.portfolio = evaluate(w, run.inputs, model, run.bands);
            result.solution = std::move(solution);
            result.qubo.emplace(std::move(qubo));
            break;
        }
        model.k_weights = refine_linear_weights(model.k_weights, w, cfg.refine_damping);
    }
    result.model = std::move(model);
    return result;
}

SolveResult run_solve(const RunConfig& cfg) {
    const PreparedRun run = prepare_run(cfg);
    SolveResult result = optimize(run, cfg, model_for(cfg, run.inputs, cfg.gamma, cfg.vol_constraint, cfg.sigma_target));

    {
        auto out = open_output(cfg, "composition.csv");
        out << "asset,sector,weight,w_min,w_max\n";
        for (std::size_t n = 0; n < run.bands.size(); ++n) {
            const auto& b = run.bands[n];
            out << b.asset << ',' << b.sector << ',' << num(result.portfolio.weights[static_cast<Eigen::Index>(n)])
                << ',' << num(b.w_min) << ',' << num(b.w_max) << '\n';
        }
    }
    {
        auto out = open_output(cfg, "solution.txt");
        write_solution(out, result.solution);
    }
    if (result.qubo) {
        auto out = open_output(cfg, "qubo.txt");
        write_qubo(out, *result.qubo);
    }
    {
        auto out = open_output(cfg, "summary.txt");
        const auto& p = result.portfolio;
        out << "experiment=solve\n"
            << "date=" << format_date(run.series.dates()[run.as_of]) << '\n'
            << "period=" << to_string(run.inputs.period()) << '\n'
            << "assets=" << run.inputs.num_assets() << '\n'
            << "bits=" << result.bits << '\n'
            << "pinned=" << (result.pinned ? "true" : "false") << '\n'
            << "energy=" << num(result.solution.energy) << '\n'
            << "direct_cost=" << num(result.direct_cost) << '\n'
            << "expected_return=" << num(p.expected_return) << '\n'
            << "volatility=" << num(p.volatility) << '\n'
            << "budget_residual=" << num(p.budget_residual) << '\n'
            << "vol_gap=" << num(p.vol_gap) << '\n'
            << "band_ok=" << (p.band_ok ? "true" : "false") << '\n';
        write_model_summary(out, result.model);
    }
    return result;
}

SweepResult run_sweep(const RunConfig& cfg) {
    if (!(cfg.sigma_target > 0.0)) fail(ErrorKind::InvalidArgument, "sweep needs sigma_target > 0");
    const PreparedRun run = prepare_run(cfg);
    const ModelConfig report = model_for(cfg, run.inputs, cfg.gamma, true, cfg.sigma_target);

    SweepResult result;
    if (cfg.sweep_mode == SweepMode::Gamma) {
        if (cfg.sweep_points == 0) fail(ErrorKind::InvalidArgument, "sweep grid is empty");
        if (!(cfg.sweep_gamma_min > 0.0) || !(cfg.sweep_gamma_max >= cfg.sweep_gamma_min)) {
            fail(ErrorKind::InvalidArgument, "sweep needs 0 < sweep_gamma_min <= sweep_gamma_max");
        }
        const double ratio = cfg.sweep_gamma_max / cfg.sweep_gamma_min;
        for (std::size_t i = 0; i < cfg.sweep_points; ++i) {
            const double frac = cfg.sweep_points > 1 ? static_cast<double>(i) / static_cast<double>(cfg.sweep_points - 1) : 0.0;
            const double gamma = cfg.sweep_gamma_min * std::pow(ratio, frac);
            const auto solved = optimize(run, cfg, model_for(cfg, run.inputs, gamma, false, cfg.sigma_target));
            result.points.push_back(
                {gamma, solved.portfolio.volatility, constraint_value(solved.portfolio.weights, run.inputs, report)});
        }
    } else {
        if (cfg.sweep_samples == 0) fail(ErrorKind::InvalidArgument, "sweep grid is empty");
        for (const auto& p : make_cloud(run, cfg, cfg.sweep_samples)) {
            result.points.push_back({std::nan(""), p.volatility, constraint_value(p.weights, run.inputs, report)});
        }
    }
    std::stable_sort(result.points.begin(), result.points.end(),
                     [](const SweepPoint& a, const SweepPoint& b) { return a.realized_vol < b.realized_vol; });
    for (std::size_t i = 1; i < result.points.size(); ++i) {
        if (result.points[i].constraint_value < result.points[result.best].constraint_value) result.best = i;
    }
    const auto& pts = result.points;
    result.grid_step = cfg.sweep_vol_step ? *cfg.sweep_vol_step : 0.1 * cfg.sigma_target;

    {
        auto out = open_output(cfg, "sweep.csv");
        out << "realized_vol,constraint_value\n";
        for (const auto& p : pts) out << num(p.realized_vol) << ',' << num(p.constraint_value) << '\n';
    }
    {
        auto out = open_output(cfg, "summary.txt");
        out << "experiment=sweep\n"
            << "date=" << format_date(run.series.dates()[run.as_of]) << '\n'
            << "period=" << to_string(run.inputs.period()) << '\n'
            << "points=" << pts.size() << '\n'
            << "min_realized_vol=" << num(pts[result.best].realized_vol) << '\n'
            << "min_constraint_value=" << num(pts[result.best].constraint_value) << '\n'
            << "grid_step=" << num(result.grid_step) << '\n';
        write_model_summary(out, report);
    }
    return result;
}

FrontierResult run_frontier(const RunConfig& cfg) {
    if (cfg.targets.empty()) fail(ErrorKind::InvalidArgument, "frontier needs at least one target volatility");
    const PreparedRun run = prepare_run(cfg);
    std::vector<double> targets = cfg.targets;
    std::sort(targets.begin(), targets.end());

    FrontierResult result;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        auto solved = optimize(run, cfg, model_for(cfg, run.inputs, cfg.gamma, true, targets[i]));
        const char* label = risk_label(i, targets.size());
        result.rows.push_back({solved.portfolio.volatility, solved.portfolio.expected_return,
                               label ? label : fmt::format("optimal_{}", i + 1)});
        result.optima.push_back(std::move(solved));
    }
    result.cloud = make_cloud(run, cfg, cfg.cloud_count);
    for (const auto& p : result.cloud) result.rows.push_back({p.volatility, p.expected_return, "cloud"});
    result.rows.push_back(ewi_row(run, cfg));

    write_frontier(cfg, result);
    auto out = open_output(cfg, "summary.txt");
    out << "experiment=frontier\n"
        << "date=" << format_date(run.series.dates()[run.as_of]) << '\n'
        << "period=" << to_string(run.inputs.period()) << '\n'
        << "cloud=" << result.cloud.size() << '\n';
    for (std::size_t i = 0; i < result.optima.size(); ++i) {
        const auto& p = result.optima[i].portfolio;
        out << fmt::format("{}: target={} volatility={} return={} budget_residual={} energy={} band_ok={}\n",
                           result.rows[i].label, num(targets[i]), num(p.volatility), num(p.expected_return),
                           num(p.budget_residual), num(result.optima[i].solution.energy), p.band_ok ? "true" : "false");
    }
    const auto& ewi = result.rows.back();
    out << "ewi: volatility=" << num(ewi.volatility) << " return=" << num(ewi.expected_return) << '\n';
    return result;
}

FrontierResult run_cloud(const RunConfig& cfg) {
    const PreparedRun run = prepare_run(cfg);
    FrontierResult result;
    result.cloud = make_cloud(run, cfg, cfg.cloud_count);
    for (const auto& p : result.cloud) result.rows.push_back({p.volatility, p.expected_return, "cloud"});
    result.rows.push_back(ewi_row(run, cfg));

    write_frontier(cfg, result);
    auto out = open_output(cfg, "summary.txt");
    double mean_ret = 0.0, mean_vol = 0.0;
    for (const auto& p : result.cloud) {
        mean_ret += p.expected_return;
        mean_vol += p.volatility;
    }
    const double count = std::max<double>(1.0, static_cast<double>(result.cloud.size()));
    out << "experiment=cloud\n"
        << "date=" << format_date(run.series.dates()[run.as_of]) << '\n'
        << "period=" << to_string(run.inputs.period()) << '\n'
        << "cloud=" << result.cloud.size() << '\n'
        << "cloud_mean_return=" << num(mean_ret / count) << '\n'
        << "cloud_mean_volatility=" << num(mean_vol / count) << '\n'
        << "ewi: volatility=" << num(result.rows.back().volatility) << " return=" << num(result.rows.back().expected_return)
        << '\n';
    return result;
}

std::size_t ValidationReport::errors() const noexcept {
    return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const Diagnostic& d) { return d.error; }));
}

std::string ValidationReport::text() const {
    std::string s;
    for (const auto& d : items) s += fmt::format("{} {}: {}\n", d.error ? "ERROR" : "WARNING", d.code, d.message);
    s += fmt::format("errors={} warnings={}\n", errors(), items.size() - errors());
    return s;
}

ValidationReport validate_run(const RunConfig& cfg) {
    ValidationReport report;
    const auto add = [&](bool error, const char* code, std::string message) {
        report.items.push_back({error, code, std::move(message)});
    };

    std::optional<PreparedRun> run;
    try {
        run.emplace(prepare_run(cfg));
    } catch (const Error& e) {
        const std::string what = e.what();
        if (e.kind() == ErrorKind::Infeasible) add(true, "FEASIBILITY", what);
        else if (what.find("semidefinite") != std::string::npos) add(true, "PSD", what);
        else if (e.kind() == ErrorKind::Validation && what.find("band") != std::string::npos) add(true, "BANDS", what);
        else add(true, "DATA", what);
        return report;
    }

    const BandSpec& bands = run->bands;
    if (bands.sum_min() > 1.0 + 1e-12) {
        add(true, "FEASIBILITY", fmt::format("sum of minimum weights is {:.6g} > 1", bands.sum_min()));
    }
    if (bands.sum_max() < 1.0 - 1e-12) {
        add(true, "FEASIBILITY", fmt::format("sum of maximum weights is {:.6g} < 1", bands.sum_max()));
    }

    std::optional<EncodingSpec> spec;
    try {
        spec.emplace(make_encoding(bands, cfg.units, cfg.grid, cfg.bit_depth));
    } catch (const Error& e) {
        add(true, "ENCODING", e.what());
    }
    for (const auto& b : bands.bands()) {
        const double lo = static_cast<double>(cfg.units) * b.w_min;
        if (std::abs(lo - std::round(lo)) > 1e-9) {
            add(false, "ENCODING", fmt::format("K*w_min = {:.6g} for {} is not whole; the budget cannot be met exactly",
                                               lo, b.asset));
        }
    }
    if (spec && cfg.solver == SolverKind::Exhaustive && spec->total_bits() > cfg.exhaustive_cap) {
        add(true, "SOLVER", fmt::format("{} bits exceed exhaustive_cap = {}", spec->total_bits(), cfg.exhaustive_cap));
    }

    if (cfg.vol_constraint && !(cfg.sigma_target > 0.0)) {
        add(true, "CONFIG", "vol_constraint is on but sigma_target is not positive");
    }
    if (cfg.experiment == Experiment::Frontier && cfg.targets.empty()) {
        add(true, "CONFIG", "frontier needs at least one target volatility");
    }
    if (cfg.sigma_target > 0.0) {
        if (cfg.period == Period::Daily && cfg.sigma_target > 0.1) {
            add(false, "UNITS", fmt::format("sigma_target {} looks yearly but period is daily", cfg.sigma_target));
        }
        if (cfg.period == Period::Yearly && cfg.sigma_target < 0.01) {
            add(false, "UNITS", fmt::format("sigma_target {} looks daily but period is yearly", cfg.sigma_target));
        }
    }

    const double rho_default = default_rho(run->inputs, cfg.gamma, cfg.units);
    if (cfg.rho && *cfg.rho < 0.1 * rho_default) {
        add(false, "SCALE", fmt::format("rho = {:.4g} is below a tenth of the default {:.4g}; the budget may drift",
                                        *cfg.rho, rho_default));
    }
    if (cfg.vol_constraint && cfg.sigma_target > 0.0 && cfg.lambda_vol) {
        const double lambda_default = default_lambda_vol(cfg.rho.value_or(rho_default), cfg.sigma_target);
        if (*cfg.lambda_vol < 0.01 * lambda_default) {
            add(false, "SCALE", fmt::format("lambda_vol = {:.4g} is far below the suggested {:.4g}; the target may be ignored",
                                            *cfg.lambda_vol, lambda_default));
        }
    }
    return report;
}

ValidationReport validate_config_file(const std::filesystem::path& path) {
    try {
        return validate_run(load_run_config(path));
    } catch (const Error& e) {
        ValidationReport report;
        report.items.push_back({true, "CONFIG", e.what()});
        return report;
    }
}

}  // namespace bandqubo
