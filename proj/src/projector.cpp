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

#include "reduxon/projector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reduxon {

namespace {

std::size_t rounded_rank(const Operator &p) {
    const double tr = p.trace().real();
    return tr <= 0.0 ? 0 : static_cast<std::size_t>(std::llround(tr));
}

double max_abs(const Matrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

} // namespace

// ---------------------------------------------------------------------------
// ProjectorSet

ProjectorSet ProjectorSet::total(const SpaceLayout &layout, std::vector<Operator> projectors) {
    return partial(layout, {}, std::move(projectors));
}

ProjectorSet ProjectorSet::partial(const SpaceLayout &layout, std::span<const std::size_t> active,
                                   std::vector<Operator> active_projectors,
                                   std::vector<std::vector<std::size_t>> labels) {
    if (active_projectors.empty()) {
        throw Error("projector set must contain at least one projector");
    }
    ProjectorSet out;
    out.layout_ = layout;
    out.active_ = active.empty() ? layout.all_indices() : layout.normalize_subset(active);
    out.inactive_ = layout.complement(out.active_);
    out.active_layout_ = layout.restrict_to(out.active_);
    if (!labels.empty() && labels.size() != active_projectors.size()) {
        throw Error("projector labels do not match the number of projectors");
    }
    out.labels_ = std::move(labels);
    for (auto &p : active_projectors) {
        if (p.dim() != out.active_layout_.total_dim()) {
            throw Error("projector dimension " + std::to_string(p.dim()) +
                        " does not match the active space dimension " +
                        std::to_string(out.active_layout_.total_dim()));
        }
        Operator pa(out.active_layout_, p.matrix());
        out.active_ranks_.push_back(rounded_rank(pa));
        out.full_.push_back(out.inactive_.empty() ? Operator(layout, pa.matrix())
                                                  : embed(pa, layout, out.active_));
        out.active_ops_.push_back(std::move(pa));
    }
    return out;
}

std::size_t ProjectorSet::rank(std::size_t i) const {
    std::size_t b = 1;
    for (auto k : inactive_) {
        b *= layout_.dim(k);
    }
    return active_rank(i) * b;
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate(std::span<const Operator> projectors, double tol) {
    ValidationReport r;
    r.tolerance = tol;
    if (projectors.empty()) {
        r.completeness = 1.0;
        return r;
    }
    const auto &layout = projectors.front().layout();
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(layout.total_dim()),
                              static_cast<Eigen::Index>(layout.total_dim()));
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        const Matrix &p = projectors[i].matrix();
        r.hermiticity = std::max(r.hermiticity, max_abs(p - p.adjoint()));
        r.idempotence = std::max(r.idempotence, max_abs(p * p - p));
        for (std::size_t j = i + 1; j < projectors.size(); ++j) {
            r.orthogonality =
                std::max(r.orthogonality, max_abs(p * projectors[j].matrix()));
        }
        sum += p;
    }
    r.completeness = max_abs(sum - Matrix::Identity(sum.rows(), sum.cols()));
    return r;
}

ValidationReport validate(const ProjectorSet &pset, double tol) {
    return validate(std::span<const Operator>(pset.projectors()), tol);
}

// ---------------------------------------------------------------------------
// Constructors

std::vector<std::size_t> SubsystemPartition::ranks() const {
    std::vector<std::size_t> out;
    for (const auto &p : projectors) {
        out.push_back(rounded_rank(p));
    }
    return out;
}

static std::vector<Matrix> block_projectors(const Matrix &basis,
                                            std::span<const std::size_t> ranks) {
    const auto n = static_cast<std::size_t>(basis.rows());
    if (basis.rows() != basis.cols()) {
        throw Error("basis must be square");
    }
    const std::size_t total = std::accumulate(ranks.begin(), ranks.end(), std::size_t{0});
    if (total != n) {
        throw Error("ranks sum to " + std::to_string(total) + " but the space has dimension " +
                    std::to_string(n));
    }
    if (std::find(ranks.begin(), ranks.end(), std::size_t{0}) != ranks.end()) {
        throw Error("ranks must be positive");
    }
    const double unitarity = max_abs(basis.adjoint() * basis - Matrix::Identity(basis.rows(), basis.cols()));
    if (unitarity > 1e-9) {
        throw Error("basis is not unitary (defect " + std::to_string(unitarity) + ")");
    }
    std::vector<Matrix> out;
    Eigen::Index col = 0;
    for (auto r : ranks) {
        const auto cols = basis.middleCols(col, static_cast<Eigen::Index>(r));
        out.emplace_back(cols * cols.adjoint());
        col += static_cast<Eigen::Index>(r);
    }
    return out;
}

ProjectorSet basis_partition(const SpaceLayout &layout, const Operator &basis,
                             std::span<const std::size_t> ranks) {
    if (basis.dim() != layout.total_dim()) {
        throw Error("basis dimension does not match layout");
    }
    std::vector<Operator> ops;
    for (auto &m : block_projectors(basis.matrix(), ranks)) {
        ops.emplace_back(layout, std::move(m));
    }
    return ProjectorSet::total(layout, std::move(ops));
}

SubsystemPartition subsystem_partition(std::size_t subsystem, const Matrix &basis,
                                       std::span<const std::size_t> ranks) {
    SubsystemPartition part;
    part.subsystem = subsystem;
    const SpaceLayout local({static_cast<std::size_t>(basis.rows())});
    for (auto &m : block_projectors(basis, ranks)) {
        part.projectors.emplace_back(local, std::move(m));
    }
    return part;
}

SubsystemPartition computational_partition(const SpaceLayout &layout, std::size_t subsystem,
                                           std::span<const std::size_t> ranks) {
    const auto d = static_cast<Eigen::Index>(layout.dim(subsystem));
    return subsystem_partition(subsystem, Matrix::Identity(d, d), ranks);
}

ProjectorSet compound(std::span<const SubsystemPartition> partitions, const SpaceLayout &layout,
                      std::span<const std::size_t> active) {
    const auto act = active.empty() ? layout.all_indices() : layout.normalize_subset(active);
    std::vector<const SubsystemPartition *> ordered;
    for (auto k : act) {
        const SubsystemPartition *found = nullptr;
        for (const auto &p : partitions) {
            if (p.subsystem == k) {
                if (found != nullptr) {
                    throw Error("subsystem " + std::to_string(k) + " has more than one partition");
                }
                found = &p;
            }
        }
        if (found == nullptr) {
            throw Error("active subsystem " + std::to_string(k) + " has no partition");
        }
        if (found->projectors.empty()) {
            throw Error("partition of subsystem " + std::to_string(k) + " is empty");
        }
        for (const auto &op : found->projectors) {
            if (op.dim() != layout.dim(k)) {
                throw Error("partition of subsystem " + std::to_string(k) +
                            " has the wrong dimension");
            }
        }
        ordered.push_back(found);
    }
    for (const auto &p : partitions) {
        if (!std::binary_search(act.begin(), act.end(), p.subsystem)) {
            throw Error("partition given for inactive subsystem " + std::to_string(p.subsystem));
        }
    }

    std::size_t count = 1;
    for (const auto *p : ordered) {
        count *= p->projectors.size();
    }
    std::vector<Operator> ops;
    std::vector<std::vector<std::size_t>> labels;
    for (std::size_t flat = 0; flat < count; ++flat) {
        // row-major decode: last active subsystem varies fastest
        std::vector<std::size_t> tuple(ordered.size());
        std::size_t rest = flat;
        for (std::size_t a = ordered.size(); a-- > 0;) {
            tuple[a] = rest % ordered[a]->projectors.size();
            rest /= ordered[a]->projectors.size();
        }
        Operator acc(SpaceLayout(std::vector<std::size_t>{}), Matrix::Identity(1, 1));
        for (std::size_t a = 0; a < ordered.size(); ++a) {
            const auto &piece = ordered[a]->projectors[tuple[a]];
            acc = tensor(acc, Operator(SpaceLayout({piece.dim()}), piece.matrix()));
        }
        ops.push_back(std::move(acc));
        labels.push_back(std::move(tuple));
    }
    return ProjectorSet::partial(layout, act, std::move(ops), std::move(labels));
}

// ---------------------------------------------------------------------------
// Observables

Observable::Observable(ProjectorSet pset, std::vector<double> eigenvalues)
    : pset_(std::move(pset)), eigenvalues_(std::move(eigenvalues)) {
    if (eigenvalues_.size() != pset_.size()) {
        throw Error("observable needs one eigenvalue per projector (" +
                    std::to_string(pset_.size()) + "), got " +
                    std::to_string(eigenvalues_.size()));
    }
    for (std::size_t i = 0; i < eigenvalues_.size(); ++i) {
        for (std::size_t j = i + 1; j < eigenvalues_.size(); ++j) {
            if (eigenvalues_[i] == eigenvalues_[j]) {
                throw Error("observable eigenvalues must be distinct; merge the projectors of "
                            "degenerate outcomes instead");
            }
        }
    }
}

Operator observable_matrix(const Observable &obs) {
    const auto &pset = obs.pset();
    Operator out = Operator::zero(pset.layout());
    for (std::size_t i = 0; i < pset.size(); ++i) {
        out = out + pset.projector(i) * Complex(obs.eigenvalues()[i], 0.0);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rotations

std::size_t rotation_parameter_count(const ProjectorSet &pset) {
    const auto d = pset.active_layout().total_dim();
    return d * d;
}

Matrix rotation_unitary(std::size_t dim, std::span<const double> params) {
    if (params.size() != dim * dim) {
        throw Error("rotation expects " + std::to_string(dim * dim) + " parameters, got " +
                    std::to_string(params.size()));
    }
    const auto n = static_cast<Eigen::Index>(dim);
    Matrix k = Matrix::Zero(n, n);
    std::size_t p = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const double x = params[p++];
            const double y = params[p++];
            k(a, b) += Complex(x, -y);
            k(b, a) += Complex(x, y);
        }
    }
    for (Eigen::Index a = 0; a < n; ++a) {
        k(a, a) += params[p++];
    }
    const auto es = eigh(k);
    Vector phases(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        phases(i) = std::polar(1.0, -0.5 * es.values(i));
    }
    return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

ProjectorSet conjugate_family(const ProjectorSet &pset, const Matrix &unitary_a) {
    std::vector<Operator> ops;
    for (const auto &p : pset.active_projectors()) {
        ops.emplace_back(p.layout(), unitary_a * p.matrix() * unitary_a.adjoint());
    }
    return ProjectorSet::partial(pset.layout(), pset.active_set(), std::move(ops), pset.labels());
}

ProjectorSet rotate_family(const ProjectorSet &pset, std::span<const double> params) {
    const auto d = pset.active_layout().total_dim();
    if (params.size() != d * d) {
        throw Error("rotate_family expects " + std::to_string(d * d) + " parameters, got " +
                    std::to_string(params.size()));
    }
    if (std::all_of(params.begin(), params.end(), [](double v) { return v == 0.0; })) {
        return pset;
    }
    return conjugate_family(pset, rotation_unitary(d, params));
}

} // namespace reduxon
