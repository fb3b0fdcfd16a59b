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

#include "bandqubo/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "bandqubo/error.hpp"

namespace bandqubo {

void ModelConfig::validate(std::size_t num_assets) const {
    if (!(gamma >= 0.0) || !(rho >= 0.0) || !(lambda_vol >= 0.0) || !(sigma_target >= 0.0)) {
        fail(ErrorKind::InvalidArgument,
             fmt::format("gamma, rho, lambda_vol and sigma_target must be non-negative "
                         "(got {}, {}, {}, {})",
                         gamma, rho, lambda_vol, sigma_target));
    }
    if (vol_constraint && static_cast<std::size_t>(k_weights.size()) != num_assets) {
        fail(ErrorKind::Dimension, fmt::format("linear weights have {} entries for {} assets",
                                               k_weights.size(), num_assets));
    }
}

Vector default_linear_weights(std::size_t num_assets) {
    if (num_assets == 0) fail(ErrorKind::InvalidArgument, "linear weights need at least one asset");
    return Vector::Constant(static_cast<Eigen::Index>(num_assets), 1.0 / static_cast<double>(num_assets));
}

Vector refine_linear_weights(const Vector& k, const Vector& solution, double damping) {
    if (k.size() != solution.size()) {
        fail(ErrorKind::Dimension, fmt::format("linear weights have {} entries, solution has {}",
                                               k.size(), solution.size()));
    }
    if (!(damping >= 0.0 && damping <= 1.0)) {
        fail(ErrorKind::InvalidArgument, fmt::format("damping must lie in [0, 1], got {}", damping));
    }
    return (1.0 - damping) * k + damping * solution;
}

double default_rho(const MarketInputs& inputs, double gamma, int units) {
    const double scale = std::max(10.0, static_cast<double>(units));
    return scale * (inputs.mu().cwiseAbs().maxCoeff() + gamma * inputs.sigma().cwiseAbs().maxCoeff());
}

double default_lambda_vol(double rho, double sigma_target) {
    if (!(sigma_target > 0.0)) fail(ErrorKind::InvalidArgument, "sigma_target must be positive");
    const double s2 = sigma_target * sigma_target;
    return rho / (s2 * s2);
}

namespace {

void check_dims(const Vector& w, const MarketInputs& inputs, const ModelConfig& cfg) {
    if (static_cast<std::size_t>(w.size()) != inputs.num_assets()) {
        fail(ErrorKind::Dimension, fmt::format("weight vector has {} entries for {} assets", w.size(),
                                               inputs.num_assets()));
    }
    cfg.validate(inputs.num_assets());
}

}  // namespace

double cost_direct(const Vector& w, const MarketInputs& inputs, const ModelConfig& cfg) {
    check_dims(w, inputs, cfg);
    const double budget = w.sum() - 1.0;
    double h = -inputs.mu().dot(w) + 0.5 * cfg.gamma * w.dot(inputs.sigma() * w) + cfg.rho * budget * budget;
    if (cfg.vol_constraint) {
        const double gap = cfg.k_weights.dot(inputs.sigma() * w) - cfg.sigma_target * cfg.sigma_target;
        h += cfg.lambda_vol * gap * gap;
    }
    return h;
}

double constraint_value(const Vector& w, const MarketInputs& inputs, const ModelConfig& cfg) {
    if (!cfg.vol_constraint) fail(ErrorKind::InvalidArgument, "volatility constraint is disabled");
    check_dims(w, inputs, cfg);
    const double gap = cfg.k_weights.dot(inputs.sigma() * w) - cfg.sigma_target * cfg.sigma_target;
    return cfg.lambda_vol * gap * gap;
}

Qubo::Qubo(Matrix q, double offset, std::vector<std::pair<std::size_t, std::size_t>> labels)
    : q_(std::move(q)), offset_(offset), labels_(std::move(labels)) {
    if (q_.rows() != q_.cols()) fail(ErrorKind::Dimension, "QUBO matrix must be square");
    if (!labels_.empty() && labels_.size() != num_bits()) {
        fail(ErrorKind::Dimension, "QUBO labels do not match its size");
    }
    if (!q_.allFinite() || !std::isfinite(offset_)) {
        fail(ErrorKind::Build, "QUBO has a NaN or Inf coefficient");
    }
    for (Eigen::Index i = 0; i < q_.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < q_.cols(); ++j) {
            if (std::abs(q_(i, j) - q_(j, i)) > 1e-12) {
                fail(ErrorKind::Build, fmt::format("QUBO matrix not symmetric at ({}, {})", i, j));
            }
        }
    }
}

double Qubo::energy(BitsView bits) const {
    if (bits.size() != num_bits()) {
        fail(ErrorKind::Dimension,
             fmt::format("bit vector has {} entries, QUBO has {} variables", bits.size(), num_bits()));
    }
    std::vector<Eigen::Index> on;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) on.push_back(static_cast<Eigen::Index>(i));
    }
    double e = 0.0;
    for (const auto i : on) {
        double row = 0.0;
        for (const auto j : on) row += q_(i, j);
        e += row;
    }
    return e + offset_;
}

std::vector<Qubo::Term> Qubo::upper_triangular() const {
    std::vector<Term> terms;
    for (Eigen::Index i = 0; i < q_.rows(); ++i) {
        if (q_(i, i) != 0.0) terms.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(i), q_(i, i)});
        for (Eigen::Index j = i + 1; j < q_.cols(); ++j) {
            if (q_(i, j) != 0.0) {
                terms.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), 2.0 * q_(i, j)});
            }
        }
    }
    return terms;
}

Qubo build_qubo(const MarketInputs& inputs, const ModelConfig& cfg, const EncodingSpec& spec,
                const BandSpec& bands) {
    const std::size_t n_assets = inputs.num_assets();
    if (spec.num_assets() != n_assets || bands.size() != n_assets) {
        fail(ErrorKind::Dimension,
             fmt::format("market has {} assets, encoding {}, bands {}", n_assets, spec.num_assets(), bands.size()));
    }
    cfg.validate(n_assets);

    const Vector& mu = inputs.mu();
    const Matrix& sigma = inputs.sigma();
    const auto bits = static_cast<Eigen::Index>(spec.total_bits());
    const double k_units = static_cast<double>(spec.total_units());

    Vector base(static_cast<Eigen::Index>(n_assets));
    for (std::size_t n = 0; n < n_assets; ++n) base[static_cast<Eigen::Index>(n)] = bands[n].w_min;

    // Bit j adds coef[j] to the weight of asset owner[j].
    std::vector<Eigen::Index> owner(static_cast<std::size_t>(bits));
    Vector coef(bits);
    for (Eigen::Index j = 0; j < bits; ++j) {
        owner[static_cast<std::size_t>(j)] = static_cast<Eigen::Index>(spec.label(static_cast<std::size_t>(j)).first);
        coef[j] = static_cast<double>(spec.bit_value(static_cast<std::size_t>(j))) / k_units;
    }

    const Vector sigma_base = sigma * base;
    const double budget_gap = base.sum() - 1.0;

    double offset = -mu.dot(base) + 0.5 * cfg.gamma * base.dot(sigma_base) + cfg.rho * budget_gap * budget_gap;
    Vector linear(bits);
    for (Eigen::Index j = 0; j < bits; ++j) {
        const auto n = owner[static_cast<std::size_t>(j)];
        linear[j] = coef[j] * (-mu[n] + cfg.gamma * sigma_base[n] + 2.0 * cfg.rho * budget_gap);
    }

    // Projection of each bit onto the linearized variance k'S w.
    Vector vol_coef = Vector::Zero(bits);
    double lambda = 0.0;
    if (cfg.vol_constraint) {
        lambda = cfg.lambda_vol;
        const Vector sigma_k = sigma * cfg.k_weights;
        const double vol_gap = sigma_k.dot(base) - cfg.sigma_target * cfg.sigma_target;
        offset += lambda * vol_gap * vol_gap;
        for (Eigen::Index j = 0; j < bits; ++j) {
            vol_coef[j] = sigma_k[owner[static_cast<std::size_t>(j)]] * coef[j];
            linear[j] += 2.0 * lambda * vol_gap * vol_coef[j];
        }
    }

    Matrix q(bits, bits);
    for (Eigen::Index i = 0; i < bits; ++i) {
        const auto ni = owner[static_cast<std::size_t>(i)];
        for (Eigen::Index j = i; j < bits; ++j) {
            const auto nj = owner[static_cast<std::size_t>(j)];
            const double v = coef[i] * coef[j] * (0.5 * cfg.gamma * sigma(ni, nj) + cfg.rho) +
                             lambda * vol_coef[i] * vol_coef[j];
            q(i, j) = v;
            q(j, i) = v;
        }
        q(i, i) += linear[i];
    }

    std::vector<std::pair<std::size_t, std::size_t>> labels;
    labels.reserve(static_cast<std::size_t>(bits));
    for (Eigen::Index j = 0; j < bits; ++j) labels.push_back(spec.label(static_cast<std::size_t>(j)));
    return Qubo(std::move(q), offset, std::move(labels));
}

void write_qubo(std::ostream& out, const Qubo& qubo) {
    out << fmt::format("# bits={} offset={:.17g}\n", qubo.num_bits(), qubo.offset());
    for (const auto& t : qubo.upper_triangular()) out << fmt::format("{} {} {:.17g}\n", t.i, t.j, t.value);
}

void write_qubo(const std::filesystem::path& path, const Qubo& qubo) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, fmt::format("cannot write '{}'", path.string()));
    write_qubo(out, qubo);
}

Qubo read_qubo(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::Parse, "empty QUBO file");
    std::size_t bits = 0;
    double offset = 0.0;
    {
        std::istringstream header(line);
        std::string hash, bits_field, offset_field;
        header >> hash >> bits_field >> offset_field;
        if (hash != "#" || bits_field.rfind("bits=", 0) != 0 || offset_field.rfind("offset=", 0) != 0) {
            fail(ErrorKind::Parse, "QUBO header must be '# bits=<B> offset=<o>'");
        }
        try {
            bits = std::stoul(bits_field.substr(5));
            offset = std::stod(offset_field.substr(7));
        } catch (const std::exception&) {
            fail(ErrorKind::Parse, "QUBO header must be '# bits=<B> offset=<o>'");
        }
    }
    Matrix q = Matrix::Zero(static_cast<Eigen::Index>(bits), static_cast<Eigen::Index>(bits));
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::size_t i = 0, j = 0;
        double v = 0.0;
        if (!(row >> i >> j >> v) || i >= bits || j >= bits) {
            fail(ErrorKind::Parse, fmt::format("QUBO line {}: expected 'i j value' with i, j < {}", line_no, bits));
        }
        const auto a = static_cast<Eigen::Index>(std::min(i, j));
        const auto b = static_cast<Eigen::Index>(std::max(i, j));
        if (a == b) {
            q(a, a) += v;
        } else {
            q(a, b) += 0.5 * v;
            q(b, a) = q(a, b);
        }
    }
    return Qubo(std::move(q), offset, {});
}

}  // namespace bandqubo
