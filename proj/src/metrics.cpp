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

#include "reduxon/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "detail.hpp"
#include "reduction_kernels.hpp"

namespace reduxon {

namespace {

void require_same_layout(const DensityOperator &rho, const DensityOperator &sigma) {
    if (rho.layout() != sigma.layout()) {
        throw Error("states have different layouts");
    }
}

// Eigenvalues under the roundoff floor are zeroed before the square root;
// otherwise 1e-17 noise on a pure state leaks in as ~3e-9.
Matrix psd_sqrt(const Matrix &m) {
    const auto es = eigh(m);
    const double floor = 1e-14 * static_cast<double>(m.rows()) * std::max(1.0, es.values.maxCoeff());
    RealVector s = es.values.unaryExpr([floor](double v) { return v > floor ? std::sqrt(v) : 0.0; });
    return es.vectors * s.cast<Complex>().asDiagonal() * es.vectors.adjoint();
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace

bool DistanceReport::contained(double slack) const {
    if (lower_bound && value < *lower_bound - slack) {
        return false;
    }
    if (upper_bound && value > *upper_bound + slack) {
        return false;
    }
    return true;
}

double trace_distance(const DensityOperator &rho, const DensityOperator &sigma) {
    require_same_layout(rho, sigma);
    const auto es = eigh(rho.matrix() - sigma.matrix());
    return clamp01(0.5 * es.values.cwiseAbs().sum());
}

double fidelity(const DensityOperator &rho, const DensityOperator &sigma) {
    require_same_layout(rho, sigma);
    const Matrix prod = psd_sqrt(rho.matrix()) * psd_sqrt(sigma.matrix());
    Eigen::JacobiSVD<Matrix> svd(prod);
    const double nuclear = svd.singularValues().sum();
    return clamp01(nuclear * nuclear);
}

DistanceReport bound_check(const DensityOperator &rho, const DensityOperator &sigma, bool pure) {
    require_same_layout(rho, sigma);
    if (pure && std::abs(rho.purity() - 1.0) > 1e-9) {
        throw Error("bound_check: state flagged pure has purity " + std::to_string(rho.purity()));
    }
    const double f = fidelity(rho, sigma);
    DistanceReport r;
    r.metric_name = "trace_distance";
    r.value = trace_distance(rho, sigma);
    r.lower_bound = pure ? 1.0 - f : 1.0 - std::sqrt(f);
    r.upper_bound = std::sqrt(std::max(0.0, 1.0 - f));
    return r;
}

double pseudometric(const DensityOperator &rho, const DensityOperator &sigma,
                    std::span<const Operator> qset) {
    require_same_layout(rho, sigma);
    const Matrix diff = rho.matrix() - sigma.matrix();
    double best = 0.0;
    for (const auto &p : qset) {
        if (p.layout() != rho.layout()) {
            throw Error("pseudometric: projector layout mismatch");
        }
        const Matrix &m = p.matrix();
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-9 ||
            (m * m - m).cwiseAbs().maxCoeff() > 1e-9) {
            throw Error("pseudometric: set member is not a projector");
        }
        best = std::max(best, std::abs(diff.cwiseProduct(m.transpose()).sum()));
    }
    return best;
}

double pseudometric(const DensityOperator &rho, const DensityOperator &sigma,
                    const ProjectorSet &qset) {
    return pseudometric(rho, sigma, std::span<const Operator>(qset.projectors()));
}

double local_distance(const DensityOperator &rho, const DensityOperator &sigma,
                      std::span<const std::size_t> subsystems) {
    require_same_layout(rho, sigma);
    const auto traced = rho.layout().complement(subsystems);
    return trace_distance(partial_trace(rho, traced), partial_trace(sigma, traced));
}

static bool same_pset(const ProjectorSet &a, const ProjectorSet &b) {
    if (a.layout() != b.layout() || a.active_set() != b.active_set() || a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a.active_projector(i).matrix() - b.active_projector(i).matrix()).cwiseAbs().maxCoeff() >
            1e-12) {
            return false;
        }
    }
    return true;
}

double class_distance(const ReducedState &a, const ReducedState &b) {
    if (!same_pset(a.pset, b.pset)) {
        throw Error("class_distance is only defined for states reduced with the same projector set");
    }
    if (a.pset.is_total()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.weights.size(); ++i) {
            acc += std::abs(a.weights[i] - b.weights[i]);
        }
        return 0.5 * acc;
    }
    return trace_distance(a.hat, b.hat);
}

double default_class_tolerance(const SpaceLayout &layout) {
    return 1e-9 * static_cast<double>(layout.total_dim());
}

double class_defect(const DensityOperator &rho, const DensityOperator &sigma, const ProjectorSet &pset) {
    require_same_layout(rho, sigma);
    if (rho.layout() != pset.layout()) {
        throw Error("class_defect: projector set layout mismatch");
    }
    const detail::ActiveSplit split(pset);
    const Matrix diff = rho.matrix() - sigma.matrix();
    double worst = 0.0;
    for (const auto &pa : pset.active_projectors()) {
        const Matrix t = detail::trace_active_with(pa.matrix(), diff, split);
        worst = std::max(worst, t.cwiseAbs().maxCoeff());
    }
    return worst;
}

bool class_equal(const DensityOperator &rho, const DensityOperator &sigma, const ProjectorSet &pset,
                 std::optional<double> tol) {
    return class_defect(rho, sigma, pset) <= tol.value_or(default_class_tolerance(rho.layout()));
}

DensityOperator class_member(const DensityOperator &rho, const ProjectorSet &pset, std::uint64_t seed) {
    if (rho.layout() != pset.layout()) {
        throw Error("class_member: projector set layout mismatch");
    }
    Rng rng(seed);
    const auto da = static_cast<Eigen::Index>(pset.active_layout().total_dim());
    Matrix u = Matrix::Zero(da, da);
    for (std::size_t i = 0; i < pset.size(); ++i) {
        const auto d = static_cast<Eigen::Index>(pset.active_rank(i));
        const auto es = eigh(pset.active_projector(i).matrix(), 1e-9);
        const Matrix range = es.vectors.rightCols(d);
        u += range * haar_unitary(static_cast<std::size_t>(d), rng) * range.adjoint();
    }
    const detail::ActiveSplit split(pset);
    const Matrix left = detail::apply_left(u, rho.matrix(), split);
    const Matrix out = detail::apply_left(u, left.adjoint(), split).adjoint();
    return detail::assume_valid(rho.layout(), out);
}

} // namespace reduxon
