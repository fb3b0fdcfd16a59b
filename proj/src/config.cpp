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

#include "bandqubo/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "bandqubo/error.hpp"

namespace bandqubo {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

class LineError {
public:
    LineError(std::string source, std::size_t line) : source_(std::move(source)), line_(line) {}
    [[noreturn]] void operator()(const std::string& what) const {
        fail(ErrorKind::Parse, fmt::format("{}:{}: {}", source_, line_, what));
    }

private:
    std::string source_;
    std::size_t line_;
};

double to_double(const std::string& v, const LineError& err) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) err(fmt::format("expected a number, got '{}'", v));
    return out;
}

template <typename Int>
Int to_int(const std::string& v, const LineError& err) {
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) err(fmt::format("expected an integer, got '{}'", v));
    return out;
}

bool to_bool(const std::string& v, const LineError& err) {
    const auto s = lower(v);
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    err(fmt::format("expected true or false, got '{}'", v));
}

std::optional<double> to_optional_double(const std::string& v, const LineError& err) {
    if (v.empty() || lower(v) == "auto") return std::nullopt;
    return to_double(v, err);
}

using Setter = std::function<void(RunConfig&, const std::string&, const LineError&)>;

const std::map<std::string, Setter>& run_keys() {
    static const std::map<std::string, Setter> keys = {
        {"data", [](RunConfig& c, const std::string& v, const LineError&) { c.data = c.base_dir / v; }},
        {"as_of", [](RunConfig& c, const std::string& v, const LineError& e) {
             try {
                 c.as_of = parse_date(v);
             } catch (const Error& ex) {
                 e(ex.what());
             }
         }},
        {"window", [](RunConfig& c, const std::string& v, const LineError& e) { c.window = to_int<std::size_t>(v, e); }},
        {"period", [](RunConfig& c, const std::string& v, const LineError& e) {
             const auto s = lower(v);
             if (s == "daily") c.period = Period::Daily;
             else if (s == "yearly") c.period = Period::Yearly;
             else e(fmt::format("period must be daily or yearly, got '{}'", v));
         }},
        {"periods_per_year", [](RunConfig& c, const std::string& v, const LineError& e) { c.periods_per_year = to_int<int>(v, e); }},
        {"missing", [](RunConfig& c, const std::string& v, const LineError& e) {
             const auto s = lower(v);
             if (s == "reject") c.csv.missing = MissingPolicy::Reject;
             else if (s == "forward_fill") c.csv.missing = MissingPolicy::ForwardFill;
             else e(fmt::format("missing must be reject or forward_fill, got '{}'", v));
         }},
        {"max_file_mb", [](RunConfig& c, const std::string& v, const LineError& e) {
             c.csv.max_bytes = to_int<std::uintmax_t>(v, e) * 1024 * 1024;
         }},
        {"k", [](RunConfig& c, const std::string& v, const LineError& e) { c.units = to_int<int>(v, e); }},
        {"grid", [](RunConfig& c, const std::string& v, const LineError& e) {
             const auto s = lower(v);
             if (s == "integral") c.grid = GridMode::Integral;
             else if (s == "continuous") c.grid = GridMode::Continuous;
             else e(fmt::format("grid must be integral or continuous, got '{}'", v));
         }},
        {"bit_depth", [](RunConfig& c, const std::string& v, const LineError& e) {
             if (v.empty() || lower(v) == "auto") c.bit_depth.reset();
             else c.bit_depth = to_int<int>(v, e);
         }},
        {"gamma", [](RunConfig& c, const std::string& v, const LineError& e) { c.gamma = to_double(v, e); }},
        {"rho", [](RunConfig& c, const std::string& v, const LineError& e) { c.rho = to_optional_double(v, e); }},
        {"lambda_vol", [](RunConfig& c, const std::string& v, const LineError& e) { c.lambda_vol = to_optional_double(v, e); }},
        {"sigma_target", [](RunConfig& c, const std::string& v, const LineError& e) { c.sigma_target = to_double(v, e); }},
        {"vol_constraint", [](RunConfig& c, const std::string& v, const LineError& e) { c.vol_constraint = to_bool(v, e); }},
        {"refine_iterations", [](RunConfig& c, const std::string& v, const LineError& e) { c.refine_iterations = to_int<std::size_t>(v, e); }},
        {"refine_damping", [](RunConfig& c, const std::string& v, const LineError& e) { c.refine_damping = to_double(v, e); }},
        {"solver", [](RunConfig& c, const std::string& v, const LineError& e) {
             const auto s = lower(v);
             if (s == "anneal") c.solver = SolverKind::Anneal;
             else if (s == "exhaustive") c.solver = SolverKind::Exhaustive;
             else e(fmt::format("solver must be anneal or exhaustive, got '{}'", v));
         }},
        {"t_start", [](RunConfig& c, const std::string& v, const LineError& e) { c.t_start = to_optional_double(v, e); }},
        {"t_end", [](RunConfig& c, const std::string& v, const LineError& e) { c.t_end = to_optional_double(v, e); }},
        {"sweeps", [](RunConfig& c, const std::string& v, const LineError& e) {
             if (v.empty() || lower(v) == "auto") c.sweeps.reset();
             else c.sweeps = to_int<std::size_t>(v, e);
         }},
        {"replicas", [](RunConfig& c, const std::string& v, const LineError& e) {
             if (v.empty() || lower(v) == "auto") c.replicas.reset();
             else c.replicas = to_int<std::size_t>(v, e);
         }},
        {"threads", [](RunConfig& c, const std::string& v, const LineError& e) { c.threads = to_int<std::size_t>(v, e); }},
        {"exhaustive_cap", [](RunConfig& c, const std::string& v, const LineError& e) { c.exhaustive_cap = to_int<std::size_t>(v, e); }},
        {"seed", [](RunConfig& c, const std::string& v, const LineError& e) { c.seed = to_int<std::uint64_t>(v, e); }},
        {"experiment", [](RunConfig& c, const std::string& v, const LineError& e) {
             try {
                 c.experiment = parse_experiment(v);
             } catch (const Error& ex) {
                 e(ex.what());
             }
         }},
        {"out", [](RunConfig& c, const std::string& v, const LineError&) { c.out_dir = c.base_dir / v; }},
        {"targets", [](RunConfig& c, const std::string& v, const LineError& e) {
             c.targets.clear();
             if (trim(v).empty()) return;
             for (const auto& item : split(v, ',')) c.targets.push_back(to_double(item, e));
         }},
        {"cloud_count", [](RunConfig& c, const std::string& v, const LineError& e) { c.cloud_count = to_int<std::size_t>(v, e); }},
        {"cloud_bands", [](RunConfig& c, const std::string& v, const LineError& e) {
             const auto s = lower(v);
             if (s == "optimizer") c.cloud_bands = CloudBandsMode::Optimizer;
             else if (s == "free") c.cloud_bands = CloudBandsMode::Free;
             else e(fmt::format("cloud_bands must be optimizer or free, got '{}'", v));
         }},
        {"ewi", [](RunConfig& c, const std::string& v, const LineError& e) {
             const auto s = lower(v);
             if (s == "buy_and_hold") c.ewi = EwiMode::BuyAndHold;
             else if (s == "rebalanced") c.ewi = EwiMode::Rebalanced;
             else e(fmt::format("ewi must be buy_and_hold or rebalanced, got '{}'", v));
         }},
        {"sweep_mode", [](RunConfig& c, const std::string& v, const LineError& e) {
             const auto s = lower(v);
             if (s == "gamma") c.sweep_mode = SweepMode::Gamma;
             else if (s == "sample") c.sweep_mode = SweepMode::Sample;
             else e(fmt::format("sweep_mode must be gamma or sample, got '{}'", v));
         }},
        {"sweep_gamma_min", [](RunConfig& c, const std::string& v, const LineError& e) { c.sweep_gamma_min = to_double(v, e); }},
        {"sweep_gamma_max", [](RunConfig& c, const std::string& v, const LineError& e) { c.sweep_gamma_max = to_double(v, e); }},
        {"sweep_points", [](RunConfig& c, const std::string& v, const LineError& e) { c.sweep_points = to_int<std::size_t>(v, e); }},
        {"sweep_samples", [](RunConfig& c, const std::string& v, const LineError& e) { c.sweep_samples = to_int<std::size_t>(v, e); }},
        {"sweep_vol_step", [](RunConfig& c, const std::string& v, const LineError& e) { c.sweep_vol_step = to_optional_double(v, e); }},
        {"default_w_min", [](RunConfig& c, const std::string& v, const LineError& e) { c.default_w_min = to_double(v, e); }},
        {"default_w_max", [](RunConfig& c, const std::string& v, const LineError& e) { c.default_w_max = to_double(v, e); }},
    };
    return keys;
}

void set_synthetic(RunConfig& c, const std::string& key, const std::string& v, const LineError& e) {
    auto& s = *c.synthetic;
    if (key == "seed") c.synthetic_seed = to_int<std::uint64_t>(v, e);
    else if (key == "assets") s.assets = to_int<std::size_t>(v, e);
    else if (key == "sectors") s.sectors = to_int<std::size_t>(v, e);
    else if (key == "days") s.days = to_int<std::size_t>(v, e);
    else if (key == "market_vol") s.market_vol = to_double(v, e);
    else if (key == "sector_vol") s.sector_vol = to_double(v, e);
    else if (key == "idio_vol_min") s.idio_vol_min = to_double(v, e);
    else if (key == "idio_vol_max") s.idio_vol_max = to_double(v, e);
    else if (key == "beta_min") s.beta_min = to_double(v, e);
    else if (key == "beta_max") s.beta_max = to_double(v, e);
    else if (key == "drift_min") s.drift_min = to_double(v, e);
    else if (key == "drift_max") s.drift_max = to_double(v, e);
    else if (key == "dominant_drift") s.dominant_drift = to_double(v, e);
    else if (key == "start_date") s.start_date = v;
    else e(fmt::format("unknown [synthetic] key '{}'", key));
}

}  // namespace

Experiment parse_experiment(std::string_view name) {
    const auto s = lower(std::string(name));
    if (s == "solve") return Experiment::Solve;
    if (s == "sweep") return Experiment::Sweep;
    if (s == "frontier") return Experiment::Frontier;
    if (s == "cloud") return Experiment::Cloud;
    if (s == "validate") return Experiment::Validate;
    fail(ErrorKind::InvalidArgument,
         fmt::format("unknown experiment '{}' (expected solve, sweep, frontier, cloud or validate)", name));
}

const char* to_string(Experiment e) noexcept {
    switch (e) {
        case Experiment::Solve: return "solve";
        case Experiment::Sweep: return "sweep";
        case Experiment::Frontier: return "frontier";
        case Experiment::Cloud: return "cloud";
        case Experiment::Validate: return "validate";
    }
    return "?";
}

RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir, std::string_view source_name) {
    RunConfig cfg;
    cfg.base_dir = base_dir;
    cfg.out_dir = base_dir / "out";
    const std::string source(source_name);

    enum class Section { Run, Assets, Sectors, Synthetic };
    Section section = Section::Run;
    bool expect_header = false;
    std::set<std::string> seen_assets;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const LineError err(source, line_no);
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') err("unterminated section header");
            const auto name = lower(trim(line.substr(1, line.size() - 2)));
            if (name == "run") section = Section::Run;
            else if (name == "assets") section = Section::Assets;
            else if (name == "sectors") section = Section::Sectors;
            else if (name == "synthetic") {
                section = Section::Synthetic;
                if (!cfg.synthetic) cfg.synthetic = SyntheticMarketSpec{};
            } else err(fmt::format("unknown section [{}]", name));
            expect_header = section == Section::Assets || section == Section::Sectors;
            continue;
        }

        if (section == Section::Run || section == Section::Synthetic) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) err(fmt::format("expected 'key = value', got '{}'", line));
            const auto key = lower(trim(line.substr(0, eq)));
            const auto value = trim(line.substr(eq + 1));
            if (section == Section::Synthetic) {
                set_synthetic(cfg, key, value, err);
                continue;
            }
            const auto& keys = run_keys();
            const auto it = keys.find(key);
            if (it == keys.end()) err(fmt::format("unknown key '{}'", key));
            it->second(cfg, value, err);
            continue;
        }

        const auto cells = split(line, ',');
        if (section == Section::Assets) {
            if (expect_header) {
                if (cells.size() < 3 || lower(cells[0]) != "asset" || lower(cells[1]) != "w_min" ||
                    lower(cells[2]) != "w_max" || (cells.size() == 4 && lower(cells[3]) != "sector") ||
                    cells.size() > 4) {
                    err("[assets] header must be 'asset,w_min,w_max,sector'");
                }
                expect_header = false;
                continue;
            }
            if (cells.size() < 3 || cells.size() > 4 || cells[0].empty()) {
                err("[assets] rows are 'asset,w_min,w_max[,sector]'");
            }
            if (!seen_assets.insert(cells[0]).second) err(fmt::format("asset {} listed twice", cells[0]));
            AssetRow row;
            row.asset = cells[0];
            if (!cells[1].empty()) row.w_min = to_double(cells[1], err);
            if (!cells[2].empty()) row.w_max = to_double(cells[2], err);
            if (cells.size() == 4) row.sector = cells[3];
            cfg.assets.push_back(std::move(row));
        } else {
            if (expect_header) {
                if (cells.size() != 3 || lower(cells[0]) != "sector" || lower(cells[1]) != "min" ||
                    lower(cells[2]) != "max") {
                    err("[sectors] header must be 'sector,min,max'");
                }
                expect_header = false;
                continue;
            }
            if (cells.size() != 3 || cells[0].empty()) err("[sectors] rows are 'sector,min,max'");
            if (cfg.sector_bands.count(cells[0])) err(fmt::format("sector {} listed twice", cells[0]));
            cfg.sector_bands[cells[0]] = {to_double(cells[1], err), to_double(cells[2], err)};
        }
    }

    if (!cfg.data && !cfg.synthetic) {
        fail(ErrorKind::Parse, "config needs either 'data = <prices.csv>' or a [synthetic] section");
    }
    if (cfg.units <= 0) fail(ErrorKind::Parse, "K must be a positive integer");
    if (cfg.window < 2) fail(ErrorKind::Parse, "window must be at least 2");
    if (cfg.periods_per_year <= 0) fail(ErrorKind::Parse, "periods_per_year must be positive");
    if (!(cfg.refine_damping >= 0.0 && cfg.refine_damping <= 1.0)) {
        fail(ErrorKind::Parse, "refine_damping must lie in [0, 1]");
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, fmt::format("cannot open config '{}'", path.string()));
    return parse_run_config(in, path.parent_path(), path.string());
}

BandSpec resolve_bands(const RunConfig& cfg, const std::vector<std::string>& assets,
                       const std::vector<std::string>& market_sectors) {
    std::map<std::string, const AssetRow*> rows;
    for (const auto& r : cfg.assets) rows.emplace(r.asset, &r);
    for (const auto& r : cfg.assets) {
        if (std::find(assets.begin(), assets.end(), r.asset) == assets.end()) {
            fail(ErrorKind::Validation, fmt::format("[assets] names {} which is not in the market data", r.asset));
        }
    }

    std::vector<std::string> sector(assets.size());
    std::map<std::string, std::size_t> members;
    for (std::size_t i = 0; i < assets.size(); ++i) {
        const auto it = rows.find(assets[i]);
        if (it != rows.end() && !it->second->sector.empty()) sector[i] = it->second->sector;
        else if (i < market_sectors.size()) sector[i] = market_sectors[i];
        if (!sector[i].empty()) ++members[sector[i]];
    }
    for (const auto& [name, band] : cfg.sector_bands) {
        if (!members.count(name) && band.first > 0.0) {
            fail(ErrorKind::Infeasible,
                 fmt::format("sector {} has no assets but a minimum investment of {}", name, band.first));
        }
    }

    std::vector<AssetBand> out;
    out.reserve(assets.size());
    for (std::size_t i = 0; i < assets.size(); ++i) {
        AssetBand b{assets[i], cfg.default_w_min, cfg.default_w_max, sector[i]};
        if (const auto s = cfg.sector_bands.find(sector[i]); s != cfg.sector_bands.end()) {
            const double count = static_cast<double>(members[sector[i]]);
            b.w_min = s->second.first / count;
            b.w_max = s->second.second / count;
        }
        if (const auto it = rows.find(assets[i]); it != rows.end()) {
            if (it->second->w_min) b.w_min = *it->second->w_min;
            if (it->second->w_max) b.w_max = *it->second->w_max;
        }
        out.push_back(std::move(b));
    }
    return BandSpec(std::move(out));
}

}  // namespace bandqubo
