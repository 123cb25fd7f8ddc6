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
 * Reduction maps: Lueders branches and mixtures, the maximum-entropy class
 * representative for total and partial reductions, and the two-step Lueders
 * construction that reproduces the partial representative.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "reduxon/hilbert.hpp"
#include "reduxon/projector.hpp"

namespace reduxon {

/// Weights at or below this are treated as zero: conditional states are
/// undefined there and such branches are skipped.
inline constexpr double kZeroWeight = 1e-12;

/// Outcome probabilities aligned with a projector set's indices.
class WeightVector {
  public:
    WeightVector() = default;
    /// Throws unless the entries sum to 1 within 1e-9 and none is below
    /// -1e-10. Small negatives are clipped to zero.
    explicit WeightVector(std::vector<double> raw);

    [[nodiscard]] const std::vector<double> &values() const { return w_; }
    [[nodiscard]] double operator[](std::size_t i) const { return w_.at(i); }
    [[nodiscard]] std::size_t size() const { return w_.size(); }

  private:
    std::vector<double> w_;
};

struct ReducedState {
    ProjectorSet pset;
    WeightVector weights;
    /// rho_i^B for partial reductions with w_i > kZeroWeight; empty otherwise.
    std::vector<std::optional<DensityOperator>> conditional;
    DensityOperator hat;

    /// Indices with w_i > kZeroWeight.
    [[nodiscard]] std::vector<std::size_t> branch_indices() const;
    /// (P_i^A / d_i^A) (x) rho_i^B, or P_i / d_i for total reductions.
    [[nodiscard]] DensityOperator branch_state(std::size_t i) const;
};

/// w_i = tr(rho P_i)
WeightVector weights(const DensityOperator &rho, const ProjectorSet &pset);

/// P_i rho P_i / w_i. Throws for w_i <= kZeroWeight.
DensityOperator lueders_branch(const DensityOperator &rho, const ProjectorSet &pset, std::size_t i);

/// sum_i P_i rho P_i
DensityOperator lueders_mix(const DensityOperator &rho, const ProjectorSet &pset);

/// sum_i (w_i / d_i) P_i. The set must be total.
ReducedState vn_hat(const DensityOperator &rho, const ProjectorSet &pset);

/// P_i / d_i
DensityOperator vndlp_branch(const ProjectorSet &pset, std::size_t i);

/// sum_i w_i (P_i^A / d_i^A) (x) rho_i^B with rho_i^B = tr_A(P_i rho) / w_i.
/// The set must leave at least one subsystem inactive.
ReducedState partial_hat(const DensityOperator &rho, const ProjectorSet &pset);

/// vn_hat for total sets, partial_hat otherwise.
ReducedState reduce(const DensityOperator &rho, const ProjectorSet &pset);

/// Two successive Lueders reductions with rank-one families on A: first the
/// eigenbasis of each P_i^A block, then the discrete-Fourier basis relative to
/// it. `basis_seed` = 0 uses the eigenbasis returned by the eigensolver; any
/// other value rotates each block's basis by a seeded Haar unitary first.
DensityOperator double_lueders(const DensityOperator &rho, const ProjectorSet &pset,
                               std::uint64_t basis_seed = 0);

/// Draws index i with probability w_i.
std::size_t sample_outcome(const WeightVector &w, Rng &rng);
std::size_t sample_outcome(const WeightVector &w, std::uint64_t seed);

/// tr_A((op_a (x) 1_B) m) for op_a acting on the active subsystems of `pset`.
Operator trace_active_with(const Operator &op_a, const Operator &m, const ProjectorSet &pset);

} // namespace reduxon
