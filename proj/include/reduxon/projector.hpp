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
 * Orthogonal projector families, compound subsystem projectors and
 * observables built from them.
 *
 * A ProjectorSet always records its active subsystems A explicitly. Each
 * member is stored twice: as the active part P_i^A acting on A alone, and as
 * the full-space operator P_i^A (x) 1_B. For a total set A is every subsystem
 * and the two coincide.
 */
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "reduxon/hilbert.hpp"

namespace reduxon {

class ProjectorSet {
  public:
    ProjectorSet() = default;

    /// Total set: every subsystem is active.
    static ProjectorSet total(const SpaceLayout &layout, std::vector<Operator> projectors);

    /// Partial set over `active`; `active_projectors` act on
    /// layout.restrict_to(active). An empty `active` means all subsystems.
    /// `labels`, if given, holds the per-subsystem index tuple of each member.
    static ProjectorSet partial(const SpaceLayout &layout, std::span<const std::size_t> active,
                                std::vector<Operator> active_projectors,
                                std::vector<std::vector<std::size_t>> labels = {});

    [[nodiscard]] const SpaceLayout &layout() const { return layout_; }
    [[nodiscard]] const SpaceLayout &active_layout() const { return active_layout_; }
    [[nodiscard]] const std::vector<std::size_t> &active_set() const { return active_; }
    [[nodiscard]] const std::vector<std::size_t> &inactive_set() const { return inactive_; }
    [[nodiscard]] bool is_total() const { return inactive_.empty(); }
    [[nodiscard]] std::size_t size() const { return full_.size(); }

    /// P_i on the full space.
    [[nodiscard]] const Operator &projector(std::size_t i) const { return full_.at(i); }
    [[nodiscard]] const std::vector<Operator> &projectors() const { return full_; }
    /// P_i^A on the active subsystems.
    [[nodiscard]] const Operator &active_projector(std::size_t i) const { return active_ops_.at(i); }
    [[nodiscard]] const std::vector<Operator> &active_projectors() const { return active_ops_; }

    /// d_i^A = tr P_i^A (rounded).
    [[nodiscard]] std::size_t active_rank(std::size_t i) const { return active_ranks_.at(i); }
    /// d_i = tr P_i (rounded).
    [[nodiscard]] std::size_t rank(std::size_t i) const;

    /// Per-subsystem index tuple, empty unless built by compound().
    [[nodiscard]] const std::vector<std::vector<std::size_t>> &labels() const { return labels_; }

  private:
    SpaceLayout layout_;
    SpaceLayout active_layout_;
    std::vector<std::size_t> active_;
    std::vector<std::size_t> inactive_;
    std::vector<Operator> active_ops_;
    std::vector<Operator> full_;
    std::vector<std::size_t> active_ranks_;
    std::vector<std::vector<std::size_t>> labels_;
};

/// Max violation of each projector-set criterion.
struct ValidationReport {
    double hermiticity = 0.0;
    double idempotence = 0.0;
    double orthogonality = 0.0;
    double completeness = 0.0;
    double tolerance = 1e-9;

    [[nodiscard]] bool passed() const {
        return hermiticity <= tolerance && idempotence <= tolerance &&
               orthogonality <= tolerance && completeness <= tolerance;
    }
};

ValidationReport validate(const ProjectorSet &pset, double tol = 1e-9);
ValidationReport validate(std::span<const Operator> projectors, double tol = 1e-9);

/// Projector family on a single subsystem.
struct SubsystemPartition {
    std::size_t subsystem = 0;
    std::vector<Operator> projectors;

    [[nodiscard]] std::vector<std::size_t> ranks() const;
};

/// P_i = sum of |b_mu><b_mu| over the i-th consecutive block of basis columns.
ProjectorSet basis_partition(const SpaceLayout &layout, const Operator &basis,
                             std::span<const std::size_t> ranks);

/// Same construction restricted to one subsystem.
SubsystemPartition subsystem_partition(std::size_t subsystem, const Matrix &basis,
                                       std::span<const std::size_t> ranks);

/// Computational-basis partition of subsystem k into blocks of the given ranks.
SubsystemPartition computational_partition(const SpaceLayout &layout, std::size_t subsystem,
                                           std::span<const std::size_t> ranks);

/// Cartesian product of subsystem partitions over `active`, flattened
/// row-major over the index tuple (first active subsystem most significant).
ProjectorSet compound(std::span<const SubsystemPartition> partitions, const SpaceLayout &layout,
                      std::span<const std::size_t> active);

class Observable {
  public:
    /// Throws unless there is one eigenvalue per projector and they are
    /// pairwise distinct.
    Observable(ProjectorSet pset, std::vector<double> eigenvalues);

    [[nodiscard]] const ProjectorSet &pset() const { return pset_; }
    [[nodiscard]] const std::vector<double> &eigenvalues() const { return eigenvalues_; }

  private:
    ProjectorSet pset_;
    std::vector<double> eigenvalues_;
};

/// sum_i lambda_i P_i
Operator observable_matrix(const Observable &obs);

/// Number of real parameters rotate_family expects: (dim of A)^2.
std::size_t rotation_parameter_count(const ProjectorSet &pset);

/// Hermitian generator on the active space from `params`: off-diagonal pairs
/// (j<k) contribute an X-type then a Y-type term, then one diagonal entry per
/// basis state. The resulting unitary is exp(-i K / 2), so a single qubit's
/// (px, py, pz0, pz1) reproduces the usual Bloch rotations.
Matrix rotation_unitary(std::size_t dim, std::span<const double> params);

/// U_A P_i^A U_A^dagger (x) 1_B with U_A = rotation_unitary(params).
ProjectorSet rotate_family(const ProjectorSet &pset, std::span<const double> params);

/// Conjugates only the active parts by an arbitrary unitary on A.
ProjectorSet conjugate_family(const ProjectorSet &pset, const Matrix &unitary_a);

} // namespace reduxon
