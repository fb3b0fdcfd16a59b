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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "bandqubo/encoding.hpp"
#include "bandqubo/market_data.hpp"

namespace bandqubo {

/// Cost-function hyperparameters.
///
///   H(w) = -mu.w + gamma/2 w'Sw + rho (sum w - 1)^2
///          [+ lambda_vol (k'Sw - sigma_target^2)^2]
///
/// lambda_vol is the multiplier of the linearized volatility penalty;
/// sigma_target is a volatility (not a variance) and is squared internally.
struct ModelConfig {
    double gamma = 0.0;
    double rho = 0.0;
    double lambda_vol = 0.0;
    double sigma_target = 0.0;
    Vector k_weights;
    bool vol_constraint = false;

    /// Throws on negative multipliers or a k vector of the wrong length.
    void validate(std::size_t num_assets) const;
};

/// Uniform linear weights 1/N.
Vector default_linear_weights(std::size_t num_assets);

/// (1 - damping) k + damping w. One step of a solve / refine / rebuild loop.
Vector refine_linear_weights(const Vector& k, const Vector& solution, double damping);

/// max(10, K) * (max|mu_n| + gamma * max|S_ij|). Moving the budget by one
/// unit of 1/K then costs more than one unit of objective can gain.
double default_rho(const MarketInputs& inputs, double gamma, int units);
/// rho / sigma_target^4; puts the volatility penalty on the budget penalty's scale.
double default_lambda_vol(double rho, double sigma_target);

/// H(w) evaluated directly in weight space.
double cost_direct(const Vector& w, const MarketInputs& inputs, const ModelConfig& cfg);

/// lambda_vol * (k'Sw - sigma_target^2)^2. Throws if the constraint is disabled.
double constraint_value(const Vector& w, const MarketInputs& inputs, const ModelConfig& cfg);

/// Dense symmetric QUBO: E(x) = x'Qx + offset over binary x.
class Qubo {
public:
    Qubo(Matrix q, double offset, std::vector<std::pair<std::size_t, std::size_t>> labels);

    std::size_t num_bits() const noexcept { return static_cast<std::size_t>(q_.rows()); }
    const Matrix& matrix() const noexcept { return q_; }
    double offset() const noexcept { return offset_; }
    /// (asset, local bit) of each variable.
    const std::vector<std::pair<std::size_t, std::size_t>>& labels() const noexcept { return labels_; }

    double energy(BitsView bits) const;

    struct Term {
        std::size_t i;
        std::size_t j;
        double value;
    };
    /// Upper-triangular coefficients (i <= j): diagonal q_ii, off-diagonal
    /// 2 q_ij. Zero entries are skipped.
    std::vector<Term> upper_triangular() const;

private:
    Matrix q_;
    double offset_;
    std::vector<std::pair<std::size_t, std::size_t>> labels_;
};

/// Substitutes w_n = w_min_n + (sum_q 2^q x_nq + M_n x_n,extra) / K into H
/// and collects terms. For every bit vector x:
///   qubo.energy(x) == cost_direct(decode(x)) up to rounding.
Qubo build_qubo(const MarketInputs& inputs, const ModelConfig& cfg, const EncodingSpec& spec,
                const BandSpec& bands);

/// Sparse triplet text: header `# bits=<B> offset=<o>`, then `i j value`
/// lines for the upper triangle.
void write_qubo(std::ostream& out, const Qubo& qubo);
void write_qubo(const std::filesystem::path& path, const Qubo& qubo);
Qubo read_qubo(std::istream& in);

}  // namespace bandqubo
