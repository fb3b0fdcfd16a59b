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
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bandqubo/encoding.hpp"
#include "bandqubo/qubo.hpp"

namespace bandqubo {

/// Geometric temperature ladder from t_start down to t_end over `sweeps`
/// full passes, repeated for `replicas` independent restarts.
struct AnnealSchedule {
    double t_start = 1.0;
    double t_end = 1e-3;
    std::size_t sweeps = 1000;
    std::size_t replicas = 8;
    std::uint64_t seed = 0;

    /// Requires t_start >= t_end > 0, sweeps >= 1, replicas >= 1.
    void validate() const;
};

/// Scale-free default: t_start = max|q_ij| * B, t_end = 1e-3 * median nonzero
/// |q_ij|, sweeps = 200 * B, replicas = max(8, B / 4).
AnnealSchedule default_schedule(const Qubo& qubo, std::uint64_t seed = 0);

struct Solution {
    Bits bits;
    double energy = 0.0;
    std::size_t replica_id = 0;
    std::size_t sweep_found = 0;
};

/// Per-replica sweep-end energies. Filled only when requested.
struct ReplicaTrace {
    std::vector<double> energy;
    std::vector<double> best;
    std::size_t uphill_moves = 0;
};

enum class MatrixPath { Auto, Dense, Sparse };

struct AnnealOptions {
    /// Worker threads; 0 uses the hardware concurrency. Output does not
    /// depend on this value.
    std::size_t threads = 0;
    /// Auto picks the sparse neighbour lists below 10% off-diagonal density.
    MatrixPath path = MatrixPath::Auto;
    std::vector<ReplicaTrace>* trace = nullptr;
};

/// Single-bit-flip Metropolis annealing. Replica r draws from the stream
/// derive_seed(schedule.seed, r); the lowest-energy state seen over all
/// replicas is returned, ties going to the lower replica id.
Solution anneal(const Qubo& qubo, const AnnealSchedule& schedule, const AnnealOptions& options = {});

/// Energy change from flipping `flip`:
///   (1 - 2 x_i) * (q_ii + 2 sum_{j != i} q_ij x_j).
double incremental_delta(const Qubo& qubo, BitsView bits, std::size_t flip);

/// Global minimum by Gray-code enumeration. Ties go to the lexicographically
/// smallest bit vector (x_0 compared first). Refuses more than `bit_cap` bits.
Solution exhaustive_solve(const Qubo& qubo, std::size_t bit_cap = 24);

/// Record `energy=... bits=0101... replica=... sweep=...`, one field per line.
void write_solution(std::ostream& out, const Solution& solution);

std::string bits_to_string(BitsView bits);

}  // namespace bandqubo
