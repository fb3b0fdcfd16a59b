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

#include "bandqubo/solver.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "bandqubo/error.hpp"
#include "bandqubo/rng.hpp"

namespace bandqubo {

void AnnealSchedule::validate() const {
    if (!(t_end > 0.0) || !(t_start >= t_end) || !std::isfinite(t_start)) {
        fail(ErrorKind::InvalidArgument,
             fmt::format("anneal temperatures need t_start >= t_end > 0, got {} and {}", t_start, t_end));
    }
    if (sweeps < 1 || replicas < 1) {
        fail(ErrorKind::InvalidArgument, "anneal schedule needs at least one sweep and one replica");
    }
}

AnnealSchedule default_schedule(const Qubo& qubo, std::uint64_t seed) {
    const std::size_t b = qubo.num_bits();
    const Matrix& q = qubo.matrix();
    std::vector<double> magnitudes;
    magnitudes.reserve(b * (b + 1) / 2);
    double largest = 0.0;
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        for (Eigen::Index j = i; j < q.cols(); ++j) {
            const double m = std::abs(q(i, j));
            if (m > 0.0) {
                magnitudes.push_back(m);
                largest = std::max(largest, m);
            }
        }
    }
    AnnealSchedule s;
    s.seed = seed;
    s.sweeps = std::max<std::size_t>(1, 200 * b);
    s.replicas = std::max<std::size_t>(8, b / 4);
    if (magnitudes.empty()) {
        s.t_start = s.t_end = 1.0;
        return s;
    }
    const auto mid = magnitudes.begin() + static_cast<std::ptrdiff_t>(magnitudes.size() / 2);
    std::nth_element(magnitudes.begin(), mid, magnitudes.end());
    double median = *mid;
    if (magnitudes.size() % 2 == 0) {
        median = 0.5 * (median + *std::max_element(magnitudes.begin(), mid));
    }
    s.t_end = 1e-3 * median;
    s.t_start = std::max(largest * static_cast<double>(b), s.t_end);
    return s;
}

double incremental_delta(const Qubo& qubo, BitsView bits, std::size_t flip) {
    const std::size_t b = qubo.num_bits();
    if (bits.size() != b) {
        fail(ErrorKind::Dimension, fmt::format("bit vector has {} entries, QUBO has {}", bits.size(), b));
    }
    if (flip >= b) fail(ErrorKind::InvalidArgument, fmt::format("flip index {} out of range [0, {})", flip, b));
    const Matrix& q = qubo.matrix();
    const auto i = static_cast<Eigen::Index>(flip);
    double field = 0.0;
    for (std::size_t j = 0; j < b; ++j) {
        if (j != flip && bits[j]) field += q(i, static_cast<Eigen::Index>(j));
    }
    const double d = bits[flip] ? -1.0 : 1.0;
    return d * (q(i, i) + 2.0 * field);
}

namespace {

struct Neighbours {
    std::vector<std::size_t> start;
    std::vector<std::size_t> index;
    std::vector<double> value;
};

Neighbours sparse_rows(const Matrix& q) {
    Neighbours nb;
    const auto b = static_cast<std::size_t>(q.rows());
    nb.start.reserve(b + 1);
    nb.start.push_back(0);
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
            const double v = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (j != i && v != 0.0) {
                nb.index.push_back(j);
                nb.value.push_back(v);
            }
        }
        nb.start.push_back(nb.index.size());
    }
    return nb;
}

struct ReplicaResult {
    Bits bits;
    double energy = 0.0;
    std::size_t sweep = 0;
};

/// One replica. `field[i]` holds sum_{j != i} q_ij x_j.
ReplicaResult run_replica(const Qubo& qubo, const AnnealSchedule& schedule, std::size_t replica,
                          const Neighbours* sparse, ReplicaTrace* trace) {
    const Matrix& q = qubo.matrix();
    const std::size_t b = qubo.num_bits();
    Rng rng(derive_seed(schedule.seed, replica));

    Bits x(b);
    for (auto& v : x) v = rng.coin() ? 1 : 0;
    std::vector<double> field(b, 0.0);
    for (std::size_t i = 0; i < b; ++i) {
        if (!x[i]) continue;
        for (std::size_t j = 0; j < b; ++j) {
            if (j != i) field[j] += q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        }
    }
    const auto resync_energy = [&] {
        double e = qubo.offset();
        for (std::size_t i = 0; i < b; ++i) {
            if (x[i]) e += q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) + field[i];
        }
        return e;
    };

    double energy = resync_energy();
    ReplicaResult best{x, energy, 0};
    const double ratio = schedule.t_end / schedule.t_start;
    for (std::size_t s = 0; s < schedule.sweeps; ++s) {
        const double frac = schedule.sweeps > 1
                                ? static_cast<double>(s) / static_cast<double>(schedule.sweeps - 1)
                                : 0.0;
        const double beta = 1.0 / (schedule.t_start * std::pow(ratio, frac));
        for (std::size_t i = 0; i < b; ++i) {
            const double d = x[i] ? -1.0 : 1.0;
            const double delta =
                d * (q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) + 2.0 * field[i]);
            if (delta > 0.0) {
                if (rng.uniform() >= std::exp(-delta * beta)) continue;
                if (trace) ++trace->uphill_moves;
            }
            x[i] ^= 1;
            energy += delta;
            if (sparse) {
                for (std::size_t k = sparse->start[i]; k < sparse->start[i + 1]; ++k) {
                    field[sparse->index[k]] += d * sparse->value[k];
                }
            } else {
                const auto col = q.col(static_cast<Eigen::Index>(i));
                for (std::size_t j = 0; j < b; ++j) {
                    if (j != i) field[j] += d * col[static_cast<Eigen::Index>(j)];
                }
            }
            if (energy < best.energy) {
                best.bits = x;
                best.energy = energy;
                best.sweep = s;
            }
        }
        energy = resync_energy();
        if (trace) {
            trace->energy.push_back(energy);
            trace->best.push_back(best.energy);
        }
    }
    best.energy = qubo.energy(best.bits);
    return best;
}

}  // namespace

Solution anneal(const Qubo& qubo, const AnnealSchedule& schedule, const AnnealOptions& options) {
    schedule.validate();
    const std::size_t b = qubo.num_bits();
    if (b == 0) return Solution{{}, qubo.offset(), 0, 0};

    std::size_t off_diagonal = 0;
    const Matrix& q = qubo.matrix();
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
            if (i != j && q(i, j) != 0.0) ++off_diagonal;
        }
    }
    const double density = b > 1 ? static_cast<double>(off_diagonal) / static_cast<double>(b * (b - 1)) : 1.0;
    const bool use_sparse = options.path == MatrixPath::Sparse ||
                            (options.path == MatrixPath::Auto && density < 0.1);
    Neighbours nb;
    if (use_sparse) nb = sparse_rows(q);

    const std::size_t replicas = schedule.replicas;
    std::vector<ReplicaResult> results(replicas);
    if (options.trace) {
        options.trace->assign(replicas, ReplicaTrace{});
    }
    std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, replicas);

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t r = next++; r < replicas; r = next++) {
            results[r] = run_replica(qubo, schedule, r, use_sparse ? &nb : nullptr,
                                     options.trace ? &(*options.trace)[r] : nullptr);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    std::size_t winner = 0;
    for (std::size_t r = 1; r < replicas; ++r) {
        if (results[r].energy < results[winner].energy) winner = r;
    }
    return Solution{std::move(results[winner].bits), results[winner].energy, winner, results[winner].sweep};
}

namespace {

/// Lexicographic rank with x_0 as the most significant position.
std::uint64_t lex_key(std::uint64_t mask, std::size_t bits) {
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < bits; ++i) r = (r << 1) | ((mask >> i) & 1);
    return r;
}

}  // namespace

Solution exhaustive_solve(const Qubo& qubo, std::size_t bit_cap) {
    const std::size_t b = qubo.num_bits();
    if (b > bit_cap || b > 40) {
        fail(ErrorKind::SolverRefused,
             fmt::format("exhaustive search over {} bits exceeds the cap of {}", b, std::min<std::size_t>(bit_cap, 40)));
    }
    const Matrix& q = qubo.matrix();
    const double scale = 1.0 + std::abs(qubo.offset()) + q.cwiseAbs().sum();
    const double tie = 1e-12 * scale;

    std::vector<double> field(b, 0.0);
    std::uint64_t mask = 0;
    double energy = qubo.offset();
    std::uint64_t best_mask = 0;
    double best_energy = energy;
    std::uint64_t best_key = 0;

    const auto resync = [&] {
        std::fill(field.begin(), field.end(), 0.0);
        energy = qubo.offset();
        for (std::size_t i = 0; i < b; ++i) {
            if (!((mask >> i) & 1)) continue;
            for (std::size_t j = 0; j < b; ++j) {
                if (j != i) field[j] += q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
            }
        }
        for (std::size_t i = 0; i < b; ++i) {
            if ((mask >> i) & 1) energy += q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) + field[i];
        }
    };

    const std::uint64_t total = b == 0 ? 1 : (std::uint64_t{1} << b);
    for (std::uint64_t step = 1; step < total; ++step) {
        const auto i = static_cast<std::size_t>(std::countr_zero(step));
        const double d = ((mask >> i) & 1) ? -1.0 : 1.0;
        energy += d * (q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) + 2.0 * field[i]);
        mask ^= std::uint64_t{1} << i;
        for (std::size_t j = 0; j < b; ++j) {
            if (j != i) field[j] += d * q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        }
        if ((step & 0xfff) == 0) resync();
        if (energy < best_energy - tie) {
            best_energy = energy;
            best_mask = mask;
            best_key = lex_key(mask, b);
        } else if (energy <= best_energy + tie) {
            const auto key = lex_key(mask, b);
            if (key < best_key) {
                best_energy = energy;
                best_mask = mask;
                best_key = key;
            }
        }
    }

    Solution out;
    out.bits.resize(b);
    for (std::size_t i = 0; i < b; ++i) out.bits[i] = (best_mask >> i) & 1;
    out.energy = qubo.energy(out.bits);
    return out;
}

std::string bits_to_string(BitsView bits) {
    std::string s;
    s.reserve(bits.size());
    for (const auto v : bits) s.push_back(v ? '1' : '0');
    return s;
}

void write_solution(std::ostream& out, const Solution& solution) {
    out << fmt::format("energy={:.17g}\nbits={}\nreplica={}\nsweep={}\n", solution.energy,
                       bits_to_string(solution.bits), solution.replica_id, solution.sweep_found);
}

}  // namespace bandqubo
