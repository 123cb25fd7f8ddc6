// Copyright 2026 The Reduxon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Toy Hamiltonians and history simulation: unitary evolution interleaved
 * with instantaneous reductions, either carrying the full mixture forward or
 * following one sampled branch.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "reduxon/hilbert.hpp"
#include "reduxon/projector.hpp"
#include "reduxon/reduction.hpp"

namespace reduxon {

/// Central qubit (subsystem 0) dephased by n_env environment qubits through
/// H = sum_k g_k sigma_z^sys sigma_z^(k).
struct DephasingModel {
    std::size_t n_env = 0;
    std::vector<double> couplings;
    SpaceLayout layout;
    Operator hamiltonian;
    Complex alpha{1.0 / std::numbers::sqrt2, 0.0};
    Complex beta{1.0 / std::numbers::sqrt2, 0.0};

    /// (alpha|0> + beta|1>) (x) |+>^n_env
    [[nodiscard]] DensityOperator initial_state() const;
};

/// Couplings drawn uniformly from [0.5, 1.5] with the given seed.
DephasingModel build_dephasing(std::size_t n_env, std::uint64_t seed);
DephasingModel build_dephasing(std::vector<double> couplings);

/// prod_k cos(2 g_k t): the closed-form suppression of the system qubit's
/// off-diagonal element relative to its initial value.
Complex dephasing_factor(const DephasingModel &model, double t);

/// |<0| tr_env rho(t) |1>| / |alpha beta|, from full simulation.
double simulated_coherence(const DephasingModel &model, double t);

/// First grid time (step `dt`, up to `t_max`) at which |r(t)| < threshold.
std::optional<double> decoherence_time(const DephasingModel &model, double t_max, double dt,
                                       double threshold = 0.05);

/// System qubit (x) 3-level pointer (x) n_env qubits:
/// H = lambda sigma_z (x) P (x) 1 + sum_k g_k Q (x) sigma_z^(k), with P the
/// pointer shift generator and Q = diag(-1, 0, 1) its position.
struct PointerModel {
    std::size_t n_env = 0;
    double lambda = 1.0;
    std::vector<double> couplings;
    SpaceLayout layout;
    Operator hamiltonian;

    /// |+> (x) |1> (x) |+>^n_env
    [[nodiscard]] DensityOperator initial_state() const;
};

PointerModel build_pointer_model(std::size_t n_env, double lambda, std::uint64_t seed);

/// Two-outcome partition of qubit subsystem k along the axis obtained by
/// rotating z by `theta` about y (theta = 0: z basis, pi/2: x basis).
ProjectorSet qubit_partition(const SpaceLayout &layout, std::size_t k, double theta);

enum class ReductionMode { lueders, vndlp, partial };

std::string to_string(ReductionMode mode);
ReductionMode parse_reduction_mode(const std::string &name);

struct ReductionEvent {
    double t = 0.0;
    ProjectorSet pset;
    ReductionMode mode = ReductionMode::lueders;
    std::string pset_ref;
};

struct HistorySchedule {
    DensityOperator initial;
    Operator hamiltonian;
    std::vector<ReductionEvent> events;
    double t0 = 0.0;
    /// Final evolution time; defaults to the last event time (or t0).
    std::optional<double> t_end;
};

enum class HistoryMode { mixture, sampling };

struct HistoryRecord {
    std::vector<WeightVector> event_weights;
    std::vector<std::size_t> sampled; ///< empty in mixture mode
    std::optional<ReducedState> final_reduced;
    DensityOperator final_state;
};

/// Throws on non-increasing times, layout mismatches, or a mode that does not
/// fit its projector set (vndlp needs a total set, partial a partial one).
void check_schedule(const HistorySchedule &schedule);

HistoryRecord run_history(const HistorySchedule &schedule, HistoryMode mode, std::uint64_t seed = 0);

/// Kolmogorov distance between the final-event outcome distributions with all
/// intermediate reductions applied (mixture mode) and with none.
double noninterference_defect(const HistorySchedule &schedule);

/// Evolves rho_a by dt and returns the pseudometric, over every projector on
/// the active subsystems of `pset_a`, between rho(t_b) and its Lueders
/// mixture with respect to `pset_a`.
double stability_defect(const DensityOperator &rho_a, const ProjectorSet &pset_a,
                        const Operator &hamiltonian, double dt);

struct FrequencyReport {
    std::size_t runs = 0;
    std::vector<std::size_t> counts;
    std::vector<double> frequencies;
    std::vector<double> weights;
    std::vector<double> radii; ///< 4 sqrt(w (1 - w) / M)
    std::vector<bool> flagged;

    [[nodiscard]] std::size_t flag_count() const;
};

/// M independent sampled histories; run r draws from derive_seed(seed, r).
FrequencyReport ensemble_frequencies(const HistorySchedule &schedule, std::size_t runs,
                                     std::uint64_t seed, std::size_t threads = 1);

} // namespace reduxon
