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
 * Distances between states and between equivalence classes of states.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "reduxon/hilbert.hpp"
#include "reduxon/projector.hpp"
#include "reduxon/reduction.hpp"

namespace reduxon {

struct DistanceReport {
    double value = 0.0;
    std::optional<double> lower_bound;
    std::optional<double> upper_bound;
    std::string metric_name;

    /// lower - slack <= value <= upper + slack, for whichever bounds are set.
    [[nodiscard]] bool contained(double slack = 1e-9) const;
};

/// 1/2 sum |eig(rho - sigma)|
double trace_distance(const DensityOperator &rho, const DensityOperator &sigma);

/// (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, evaluated as the squared nuclear
/// norm of sqrt(rho) sqrt(sigma).
double fidelity(const DensityOperator &rho, const DensityOperator &sigma);

/// Trace distance with its fidelity bounds: 1 - sqrt(F) <= D <= sqrt(1 - F),
/// tightened to 1 - F <= D when `pure` is set. Throws if `pure` is set and
/// tr(rho^2) differs from 1 by more than 1e-9.
DistanceReport bound_check(const DensityOperator &rho, const DensityOperator &sigma, bool pure);

/// max over P in qset of |tr(P (rho - sigma))|. Members need not be
/// orthogonal, but each must be a projector within 1e-9.
double pseudometric(const DensityOperator &rho, const DensityOperator &sigma,
                    std::span<const Operator> qset);
double pseudometric(const DensityOperator &rho, const DensityOperator &sigma,
                    const ProjectorSet &qset);

/// Pseudometric over every projector acting on `subsystems` alone, which is
/// the trace distance between the marginals on those subsystems.
double local_distance(const DensityOperator &rho, const DensityOperator &sigma,
                      std::span<const std::size_t> subsystems);

/// Kolmogorov distance 1/2 sum |w_i - w'_i| for total reductions, trace
/// distance of the representatives for partial ones. Both states must come
/// from the same projector set.
double class_distance(const ReducedState &a, const ReducedState &b);

/// Default class-equality tolerance: 1e-9 scaled by the total dimension.
double default_class_tolerance(const SpaceLayout &layout);

/// True iff tr_A((rho - sigma) P_i) vanishes (entrywise, within `tol`) for
/// every member of the set.
bool class_equal(const DensityOperator &rho, const DensityOperator &sigma, const ProjectorSet &pset,
                 std::optional<double> tol = std::nullopt);

/// Largest entrywise |tr_A((rho - sigma) P_i)| over the set.
double class_defect(const DensityOperator &rho, const DensityOperator &sigma, const ProjectorSet &pset);

/// V rho V^dagger for a seeded random unitary V = sum_i U_i^A (x) 1_B that
/// acts inside each block P_i^A; the result lies in the class of rho.
DensityOperator class_member(const DensityOperator &rho, const ProjectorSet &pset, std::uint64_t seed);

} // namespace reduxon
