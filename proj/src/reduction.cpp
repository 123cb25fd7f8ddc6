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

#include "reduxon/reduction.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "detail.hpp"
#include "reduction_kernels.hpp"

namespace reduxon {

// ---------------------------------------------------------------------------
// Kernels acting on the active factor only

namespace detail {

ActiveSplit::ActiveSplit(const ProjectorSet &pset)
    : a(subset_offsets(pset.layout(), pset.active_set())),
      b(subset_offsets(pset.layout(), pset.inactive_set())) {}

Matrix apply_left(const Matrix &op_a, const Matrix &m, const ActiveSplit &split) {
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    const auto da = static_cast<Eigen::Index>(split.a.size());
    for (auto ob : split.b) {
        for (Eigen::Index r = 0; r < da; ++r) {
            const auto row = static_cast<Eigen::Index>(split.a[static_cast<std::size_t>(r)] + ob);
            for (Eigen::Index c = 0; c < da; ++c) {
                const Complex coef = op_a(r, c);
                if (coef == Complex{}) {
                    continue;
                }
                out.row(row) +=
                    coef * m.row(static_cast<Eigen::Index>(split.a[static_cast<std::size_t>(c)] + ob));
            }
        }
    }
    return out;
}

Matrix sandwich(const Matrix &p_a, const Matrix &m, const ActiveSplit &split) {
    // (P (x) 1) M (P (x) 1) = [(P (x) 1) [(P (x) 1) M]^dagger]^dagger for Hermitian P
    const Matrix left = apply_left(p_a, m, split);
    return apply_left(p_a, left.adjoint(), split).adjoint();
}

Matrix trace_active_with(const Matrix &op_a, const Matrix &m, const ActiveSplit &split) {
    const auto nb = static_cast<Eigen::Index>(split.b.size());
    const auto da = static_cast<Eigen::Index>(split.a.size());
    Matrix out = Matrix::Zero(nb, nb);
    for (Eigen::Index a = 0; a < da; ++a) {
        for (Eigen::Index c = 0; c < da; ++c) {
            const Complex coef = op_a(a, c);
            if (coef == Complex{}) {
                continue;
            }
            const auto oa = split.a[static_cast<std::size_t>(a)];
            const auto oc = split.a[static_cast<std::size_t>(c)];
            for (Eigen::Index b = 0; b < nb; ++b) {
                for (Eigen::Index bp = 0; bp < nb; ++bp) {
                    out(b, bp) += coef * m(static_cast<Eigen::Index>(oc + split.b[static_cast<std::size_t>(b)]),
                                           static_cast<Eigen::Index>(oa + split.b[static_cast<std::size_t>(bp)]));
                }
            }
        }
    }
    return out;
}

double weight_of(const Matrix &rho, const Matrix &p) {
    // tr(rho P) = sum_jk rho_jk P_kj
    return rho.cwiseProduct(p.transpose()).sum().real();
}

} // namespace detail

// ---------------------------------------------------------------------------
// WeightVector

WeightVector::WeightVector(std::vector<double> raw) : w_(std::move(raw)) {
    double sum = 0.0;
    for (auto &v : w_) {
        if (!std::isfinite(v)) {
            throw Error("weight is not finite");
        }
        if (v < -1e-10) {
            throw Error("negative weight " + std::to_string(v));
        }
        if (v < 0.0) {
            v = 0.0;
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw Error("weights sum to " + std::to_string(sum) + " instead of 1");
    }
}

// ---------------------------------------------------------------------------
// ReducedState

std::vector<std::size_t> ReducedState::branch_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > kZeroWeight) {
            out.push_back(i);
        }
    }
    return out;
}

DensityOperator ReducedState::branch_state(std::size_t i) const {
    if (i >= pset.size()) {
        throw Error("branch index out of range");
    }
    if (pset.is_total()) {
        return vndlp_branch(pset, i);
    }
    if (i >= conditional.size() || !conditional[i]) {
        throw Error("branch " + std::to_string(i) + " has zero weight; its conditional state is undefined");
    }
    const auto &pa = pset.active_projector(i);
    const Operator normalized = pa * Complex(1.0 / static_cast<double>(pset.active_rank(i)), 0.0);
    const Operator full = combine(normalized, pset.active_set(), conditional[i]->as_operator(), pset.layout());
    return detail::assume_valid(pset.layout(), full.matrix());
}

// ---------------------------------------------------------------------------
// Reductions

static void require_layout(const DensityOperator &rho, const ProjectorSet &pset) {
    if (rho.layout() != pset.layout()) {
        throw Error("state and projector set have different layouts");
    }
}

WeightVector weights(const DensityOperator &rho, const ProjectorSet &pset) {
    require_layout(rho, pset);
    std::vector<double> w;
    w.reserve(pset.size());
    for (const auto &p : pset.projectors()) {
        w.push_back(detail::weight_of(rho.matrix(), p.matrix()));
    }
    return WeightVector(std::move(w));
}

DensityOperator lueders_branch(const DensityOperator &rho, const ProjectorSet &pset, std::size_t i) {
    require_layout(rho, pset);
    if (i >= pset.size()) {
        throw Error("branch index out of range");
    }
    const double w = detail::weight_of(rho.matrix(), pset.projector(i).matrix());
    if (w <= kZeroWeight) {
        throw Error("branch " + std::to_string(i) + " has zero weight");
    }
    const detail::ActiveSplit split(pset);
    return detail::assume_valid(pset.layout(),
                                detail::sandwich(pset.active_projector(i).matrix(), rho.matrix(), split));
}

DensityOperator lueders_mix(const DensityOperator &rho, const ProjectorSet &pset) {
    require_layout(rho, pset);
    const detail::ActiveSplit split(pset);
    Matrix acc = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (std::size_t i = 0; i < pset.size(); ++i) {
        if (detail::weight_of(rho.matrix(), pset.projector(i).matrix()) <= kZeroWeight) {
            continue;
        }
        acc += detail::sandwich(pset.active_projector(i).matrix(), rho.matrix(), split);
    }
    return detail::assume_valid(pset.layout(), acc);
}

ReducedState vn_hat(const DensityOperator &rho, const ProjectorSet &pset) {
    require_layout(rho, pset);
    if (!pset.is_total()) {
        throw Error("vn_hat requires a total projector set; use partial_hat");
    }
    auto w = weights(rho, pset);
    Matrix hat = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (std::size_t i = 0; i < pset.size(); ++i) {
        if (w[i] > 0.0) {
            hat += (w[i] / static_cast<double>(pset.rank(i))) * pset.projector(i).matrix();
        }
    }
    ReducedState out{pset, std::move(w), std::vector<std::optional<DensityOperator>>(pset.size()),
                     detail::assume_valid(pset.layout(), hat)};
    return out;
}

DensityOperator vndlp_branch(const ProjectorSet &pset, std::size_t i) {
    if (i >= pset.size()) {
        throw Error("branch index out of range");
    }
    const auto &p = pset.projector(i);
    return detail::assume_valid(pset.layout(), p.matrix() / static_cast<double>(pset.rank(i)));
}

ReducedState partial_hat(const DensityOperator &rho, const ProjectorSet &pset) {
    require_layout(rho, pset);
    if (pset.is_total()) {
        throw Error("partial_hat requires at least one inactive subsystem; use vn_hat");
    }
    auto w = weights(rho, pset);
    const detail::ActiveSplit split(pset);
    const SpaceLayout layout_b = pset.layout().restrict_to(pset.inactive_set());
    std::vector<std::optional<DensityOperator>> cond(pset.size());
    Matrix hat = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (std::size_t i = 0; i < pset.size(); ++i) {
        if (w[i] <= kZeroWeight) {
            continue;
        }
        const auto &pa = pset.active_projector(i);
        const Matrix tb = detail::trace_active_with(pa.matrix(), rho.matrix(), split);
        cond[i] = detail::assume_valid(layout_b, tb / w[i]);
        const Operator left = pa * Complex(w[i] / static_cast<double>(pset.active_rank(i)), 0.0);
        hat += combine(left, pset.active_set(), cond[i]->as_operator(), pset.layout()).matrix();
    }
    return ReducedState{pset, std::move(w), std::move(cond), detail::assume_valid(pset.layout(), hat)};
}

ReducedState reduce(const DensityOperator &rho, const ProjectorSet &pset) {
    return pset.is_total() ? vn_hat(rho, pset) : partial_hat(rho, pset);
}

Operator trace_active_with(const Operator &op_a, const Operator &m, const ProjectorSet &pset) {
    if (op_a.dim() != pset.active_layout().total_dim() || m.layout() != pset.layout()) {
        throw Error("trace_active_with: dimension mismatch");
    }
    const detail::ActiveSplit split(pset);
    return {pset.layout().restrict_to(pset.inactive_set()),
            detail::trace_active_with(op_a.matrix(), m.matrix(), split)};
}

DensityOperator double_lueders(const DensityOperator &rho, const ProjectorSet &pset,
                               std::uint64_t basis_seed) {
    require_layout(rho, pset);
    const detail::ActiveSplit split(pset);
    Rng rng(basis_seed);

    std::vector<Vector> first;  // eigenbasis vectors of every block
    std::vector<Vector> second; // Fourier vectors relative to them
    for (std::size_t i = 0; i < pset.size(); ++i) {
        const auto d = static_cast<Eigen::Index>(pset.active_rank(i));
        const auto es = eigh(pset.active_projector(i).matrix(), 1e-9);
        // projector eigenvalues ascending: the range is the last d columns
        Matrix block = es.vectors.rightCols(d);
        if (basis_seed != 0) {
            block = block * haar_unitary(static_cast<std::size_t>(d), rng);
        }
        for (Eigen::Index mu = 0; mu < d; ++mu) {
            first.emplace_back(block.col(mu));
        }
        for (Eigen::Index beta = 0; beta < d; ++beta) {
            Vector f = Vector::Zero(block.rows());
            for (Eigen::Index mu = 0; mu < d; ++mu) {
                const double phase = 2.0 * std::numbers::pi * static_cast<double>(mu * beta) /
                                     static_cast<double>(d);
                f += std::polar(1.0 / std::sqrt(static_cast<double>(d)), phase) * block.col(mu);
            }
            second.push_back(std::move(f));
        }
    }

    auto pass = [&](const Matrix &state, const std::vector<Vector> &family) {
        Matrix acc = Matrix::Zero(state.rows(), state.cols());
        for (const auto &v : family) {
            acc += detail::sandwich(v * v.adjoint(), state, split);
        }
        return acc;
    };
    const Matrix once = pass(rho.matrix(), first);
    return detail::assume_valid(pset.layout(), pass(once, second));
}

std::size_t sample_outcome(const WeightVector &w, Rng &rng) {
    if (w.size() == 0) {
        throw Error("cannot sample from an empty weight vector");
    }
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double u = uniform(rng);
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= 0.0) {
            continue;
        }
        last_positive = i;
        cum += w[i];
        if (u < cum) {
            return i;
        }
    }
    return last_positive;
}

std::size_t sample_outcome(const WeightVector &w, std::uint64_t seed) {
    Rng rng(seed);
    return sample_outcome(w, rng);
}

} // namespace reduxon
