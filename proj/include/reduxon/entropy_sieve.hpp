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
 * Von Neumann entropy and the entropy-generation functional used to rank
 * projector families, plus a derivative-free search over such families.
 *
 * For a projector set P and a state rho_a, the functional is
 *
 *     G = sum_i w_i [ S(hat(U rho_i U^dagger)) - S(rho_i) ]
 *
 * where rho_i are the branches of the reduction of rho_a by P, U evolves them
 * over the window dt and hat() re-reduces with the same P. G >= 0, and G = 0
 * exactly when every branch stays its own representative.
 */
#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "reduxon/hilbert.hpp"
#include "reduxon/projector.hpp"

namespace reduxon {

/// -tr(rho ln rho), 0 ln 0 = 0.
double entropy(const DensityOperator &rho);

struct SieveEvaluation {
    double G = 0.0;
    /// Same functional with S(rho_i(t_b)) in place of S(rho_i(t_a)).
    double G_after = 0.0;
    std::vector<double> weights;
    /// second_weights(i, j): weight of outcome j when branch i is re-reduced.
    Eigen::MatrixXd second_weights;
};

/// Evaluates G for one projector set. Throws if the two forms of the
/// functional disagree by more than 1e-10 (entropy must be conserved by the
/// unitary step).
SieveEvaluation evaluate_sieve(const DensityOperator &rho_a, const ProjectorSet &pset,
                               const Propagator &propagator, double dt);

struct ExplicitCandidates {
    std::vector<ProjectorSet> psets;
    std::vector<std::string> names; ///< optional, same length as psets
};

/// rotate_family(reference, p) for every parameter vector p.
struct RotationGrid {
    ProjectorSet reference;
    std::vector<std::vector<double>> points;
};

/// Nelder-Mead over rotate_family parameters, capped at max_evaluations.
struct RotationSearch {
    ProjectorSet reference;
    std::vector<double> start; ///< empty means all zeros
    double initial_step = 0.5;
    std::size_t max_evaluations = 200;
    double tolerance = 1e-10;
};

using CandidateFamily = std::variant<ExplicitCandidates, RotationGrid, RotationSearch>;

struct SieveConfig {
    Operator hamiltonian;
    double dt = 0.0;
    CandidateFamily candidates;
    std::size_t threads = 1;
};

struct LandscapePoint {
    std::string id;
    std::vector<double> params;
    double G = 0.0;
};

struct SieveResult {
    ProjectorSet best_pset;
    double best_G = 0.0;
    std::size_t best_index = 0;
    std::vector<LandscapePoint> landscape;
};

double sieve_G(const DensityOperator &rho_a, const ProjectorSet &pset, const SieveConfig &config);

/// Explicit lists and grids are evaluated exhaustively; ties go to the first
/// index. A search that runs out of budget returns the best point found.
SieveResult sieve_search(const DensityOperator &rho_a, const SieveConfig &config);

} // namespace reduxon
