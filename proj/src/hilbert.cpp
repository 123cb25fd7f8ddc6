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

#include "reduxon/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

#include "detail.hpp"

namespace reduxon {

// ---------------------------------------------------------------------------
// SpaceLayout

SpaceLayout::SpaceLayout(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    total_ = 1;
    for (auto d : dims_) {
        if (d == 0) {
            throw Error("SpaceLayout: subsystem dimension must be >= 1");
        }
        total_ *= d;
    }
}

std::vector<std::size_t>
SpaceLayout::normalize_subset(std::span<const std::size_t> subset) const {
    std::vector<std::size_t> out(subset.begin(), subset.end());
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
        throw Error("subsystem subset contains duplicates");
    }
    if (!out.empty() && out.back() >= dims_.size()) {
        throw Error("subsystem index " + std::to_string(out.back()) + " out of range (" +
                    std::to_string(dims_.size()) + " subsystems)");
    }
    return out;
}

SpaceLayout SpaceLayout::restrict_to(std::span<const std::size_t> subset) const {
    std::vector<std::size_t> d;
    for (auto k : normalize_subset(subset)) {
        d.push_back(dims_[k]);
    }
    return SpaceLayout(std::move(d));
}

std::vector<std::size_t>
SpaceLayout::complement(std::span<const std::size_t> subset) const {
    auto s = normalize_subset(subset);
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (!std::binary_search(s.begin(), s.end(), k)) {
            out.push_back(k);
        }
    }
    return out;
}

std::vector<std::size_t> SpaceLayout::all_indices() const {
    std::vector<std::size_t> out(dims_.size());
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
}

namespace detail {

std::vector<std::size_t> subset_offsets(const SpaceLayout &layout,
                                        std::span<const std::size_t> subset) {
    const auto &dims = layout.dims();
    std::vector<std::size_t> stride(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) {
        stride[k - 1] = stride[k] * dims[k];
    }
    std::vector<std::size_t> offsets{0};
    for (auto k : subset) {
        std::vector<std::size_t> next;
        next.reserve(offsets.size() * dims[k]);
        for (auto base : offsets) {
            for (std::size_t digit = 0; digit < dims[k]; ++digit) {
                next.push_back(base + digit * stride[k]);
            }
        }
        offsets = std::move(next);
    }
    return offsets;
}

DensityOperator assume_valid(const SpaceLayout &layout, const Matrix &m) {
    Matrix h = 0.5 * (m + m.adjoint());
    const double tr = h.trace().real();
    if (!(tr > 0.0)) {
        throw Error("density operator has nonpositive trace");
    }
    h /= tr;
    return DensityOperator(Operator(layout, std::move(h)));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(SpaceLayout layout, Matrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(layout_.total_dim());
    if (matrix_.rows() != n || matrix_.cols() != n) {
        throw Error("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                    std::to_string(matrix_.cols()) + " but layout dimension is " +
                    std::to_string(n));
    }
}

Operator Operator::identity(const SpaceLayout &layout) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    return {layout, Matrix::Identity(n, n)};
}

Operator Operator::zero(const SpaceLayout &layout) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    return {layout, Matrix::Zero(n, n)};
}

Operator Operator::adjoint() const { return {layout_, matrix_.adjoint()}; }

double Operator::hermiticity_defect() const {
    if (matrix_.size() == 0) {
        return 0.0;
    }
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

bool Operator::is_hermitian(double tol) const { return hermiticity_defect() <= tol; }

static void require_same_layout(const SpaceLayout &a, const SpaceLayout &b, const char *what) {
    if (a != b) {
        throw Error(std::string(what) + ": layout mismatch");
    }
}

Operator Operator::operator+(const Operator &other) const {
    require_same_layout(layout_, other.layout_, "operator+");
    return {layout_, matrix_ + other.matrix_};
}

Operator Operator::operator-(const Operator &other) const {
    require_same_layout(layout_, other.layout_, "operator-");
    return {layout_, matrix_ - other.matrix_};
}

Operator Operator::operator*(const Operator &other) const {
    require_same_layout(layout_, other.layout_, "operator*");
    return {layout_, matrix_ * other.matrix_};
}

Operator Operator::operator*(Complex scalar) const { return {layout_, matrix_ * scalar}; }

// ---------------------------------------------------------------------------
// DensityOperator

DensityOperator DensityOperator::from_matrix(const SpaceLayout &layout, const Matrix &m,
                                             const Tolerances &tol) {
    Operator op(layout, m);
    const double herm = op.hermiticity_defect();
    if (herm > tol.herm) {
        throw Error("density operator is not Hermitian (defect " + std::to_string(herm) + ")");
    }
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > tol.trace) {
        throw Error("density operator trace " + std::to_string(tr) + " differs from 1");
    }
    Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) {
        throw Error("eigendecomposition failed");
    }
    RealVector ev = es.eigenvalues();
    if (ev.size() > 0 && ev.minCoeff() < -tol.psd) {
        throw Error("density operator has negative eigenvalue " + std::to_string(ev.minCoeff()));
    }
    if (ev.size() > 0 && ev.minCoeff() < 0.0) {
        ev = ev.cwiseMax(0.0);
        h = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    }
    h /= h.trace().real();
    return DensityOperator(Operator(layout, std::move(h)));
}

DensityOperator DensityOperator::from_operator(const Operator &op, const Tolerances &tol) {
    return from_matrix(op.layout(), op.matrix(), tol);
}

DensityOperator DensityOperator::pure(const SpaceLayout &layout, const Vector &psi) {
    if (static_cast<std::size_t>(psi.size()) != layout.total_dim()) {
        throw Error("state vector length does not match layout");
    }
    const double norm = psi.norm();
    if (!(norm > 0.0)) {
        throw Error("zero state vector");
    }
    const Vector v = psi / norm;
    return DensityOperator(Operator(layout, v * v.adjoint()));
}

DensityOperator DensityOperator::maximally_mixed(const SpaceLayout &layout) {
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    return DensityOperator(
        Operator(layout, Matrix::Identity(n, n) / static_cast<double>(layout.total_dim())));
}

double DensityOperator::purity() const {
    // tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho
    return matrix().squaredNorm();
}

// ---------------------------------------------------------------------------
// Algebra

EigenSystem eigh(const Matrix &m, double herm_tol) {
    if (m.rows() != m.cols()) {
        throw Error("eigh: matrix is not square");
    }
    if (m.size() > 0) {
        const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (defect > herm_tol) {
            throw Error("eigh: matrix is not Hermitian (defect " + std::to_string(defect) + ")");
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
    if (es.info() != Eigen::Success) {
        throw Error("eigh: eigendecomposition failed");
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

Operator tensor(const Operator &a, const Operator &b) {
    std::vector<std::size_t> dims = a.layout().dims();
    dims.insert(dims.end(), b.layout().dims().begin(), b.layout().dims().end());
    Matrix k = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
    return {SpaceLayout(std::move(dims)), std::move(k)};
}

Operator combine(const Operator &a, std::span<const std::size_t> subset_a, const Operator &b,
                 const SpaceLayout &layout) {
    const auto sa = layout.normalize_subset(subset_a);
    const auto sb = layout.complement(sa);
    if (a.layout() != layout.restrict_to(sa)) {
        throw Error("combine: first factor does not match the selected subsystems");
    }
    if (b.layout() != layout.restrict_to(sb)) {
        throw Error("combine: second factor does not match the complementary subsystems");
    }
    const auto off_a = detail::subset_offsets(layout, sa);
    const auto off_b = detail::subset_offsets(layout, sb);
    const auto n = static_cast<Eigen::Index>(layout.total_dim());
    Matrix out = Matrix::Zero(n, n);
    const auto &am = a.matrix();
    const auto &bm = b.matrix();
    for (std::size_t i = 0; i < off_a.size(); ++i) {
        for (std::size_t ip = 0; ip < off_a.size(); ++ip) {
            const Complex aval = am(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ip));
            if (aval == Complex{}) {
                continue;
            }
            for (std::size_t j = 0; j < off_b.size(); ++j) {
                for (std::size_t jp = 0; jp < off_b.size(); ++jp) {
                    out(static_cast<Eigen::Index>(off_a[i] + off_b[j]),
                        static_cast<Eigen::Index>(off_a[ip] + off_b[jp])) =
                        aval * bm(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(jp));
                }
            }
        }
    }
    return {layout, std::move(out)};
}

Operator embed(const Operator &op, const SpaceLayout &layout, std::span<const std::size_t> subset) {
    const auto sa = layout.normalize_subset(subset);
    if (op.layout() != layout.restrict_to(sa)) {
        throw Error("embed: operator dimension does not match the target subsystems");
    }
    return combine(op, sa, Operator::identity(layout.restrict_to(layout.complement(sa))), layout);
}

Operator embed(const Operator &op_k, const SpaceLayout &layout, std::size_t k) {
    if (k >= layout.subsystem_count()) {
        throw Error("embed: subsystem index " + std::to_string(k) + " out of range");
    }
    if (op_k.dim() != layout.dim(k)) {
        throw Error("embed: operator dimension " + std::to_string(op_k.dim()) +
                    " does not match subsystem dimension " + std::to_string(layout.dim(k)));
    }
    const std::size_t sub[] = {k};
    return embed(Operator(SpaceLayout({layout.dim(k)}), op_k.matrix()), layout, sub);
}

Operator partial_trace(const Operator &op, std::span<const std::size_t> traced) {
    const auto &layout = op.layout();
    const auto st = layout.normalize_subset(traced);
    const auto keep = layout.complement(st);
    const auto off_keep = detail::subset_offsets(layout, keep);
    const auto off_tr = detail::subset_offsets(layout, st);
    const auto n = static_cast<Eigen::Index>(off_keep.size());
    Matrix out = Matrix::Zero(n, n);
    const auto &m = op.matrix();
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            Complex acc{};
            for (auto t : off_tr) {
                acc += m(static_cast<Eigen::Index>(off_keep[static_cast<std::size_t>(r)] + t),
                         static_cast<Eigen::Index>(off_keep[static_cast<std::size_t>(c)] + t));
            }
            out(r, c) = acc;
        }
    }
    return {layout.restrict_to(keep), std::move(out)};
}

DensityOperator partial_trace(const DensityOperator &rho, std::span<const std::size_t> traced) {
    const Operator reduced = partial_trace(rho.as_operator(), traced);
    return detail::assume_valid(reduced.layout(), reduced.matrix());
}

Operator herm_fn(const Matrix &m, const SpaceLayout &layout,
                 const std::function<double(double)> &fn) {
    const auto es = eigh(m);
    RealVector f(es.values.size());
    for (Eigen::Index i = 0; i < es.values.size(); ++i) {
        f(i) = fn(es.values(i));
    }
    Matrix out = es.vectors * f.cast<Complex>().asDiagonal() * es.vectors.adjoint();
    return {layout, std::move(out)};
}

Operator herm_fn(const Operator &op, const std::function<double(double)> &fn) {
    return herm_fn(op.matrix(), op.layout(), fn);
}

double xlnx(double x) { return x <= 0.0 ? 0.0 : x * std::log(x); }

// ---------------------------------------------------------------------------
// Evolution

Propagator::Propagator(const Operator &hamiltonian) : layout_(hamiltonian.layout()) {
    const auto &h = hamiltonian.matrix();
    if (!hamiltonian.is_hermitian()) {
        throw Error("Hamiltonian is not Hermitian (defect " +
                    std::to_string(hamiltonian.hermiticity_defect()) + ")");
    }
    Matrix off = h;
    off.diagonal().setZero();
    diagonal_ = off.size() == 0 || off.cwiseAbs().maxCoeff() == 0.0;
    if (diagonal_) {
        energies_ = h.diagonal().real();
        basis_ = Matrix::Identity(h.rows(), h.cols());
    } else {
        auto es = eigh(h);
        energies_ = std::move(es.values);
        basis_ = std::move(es.vectors);
    }
}

Matrix Propagator::unitary(double dt) const {
    Vector phases(energies_.size());
    for (Eigen::Index i = 0; i < energies_.size(); ++i) {
        phases(i) = std::polar(1.0, -energies_(i) * dt);
    }
    if (diagonal_) {
        return phases.asDiagonal();
    }
    return basis_ * phases.asDiagonal() * basis_.adjoint();
}

DensityOperator Propagator::evolve(const DensityOperator &rho, double dt) const {
    require_same_layout(layout_, rho.layout(), "evolve");
    if (dt == 0.0) {
        return rho;
    }
    const Eigen::Index n = energies_.size();
    Vector phases(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        phases(i) = std::polar(1.0, -energies_(i) * dt);
    }
    Matrix out;
    if (diagonal_) {
        out = phases.asDiagonal() * rho.matrix() * phases.conjugate().asDiagonal();
    } else {
        const Matrix u = basis_ * phases.asDiagonal() * basis_.adjoint();
        out = u * rho.matrix() * u.adjoint();
    }
    return detail::assume_valid(layout_, out);
}

DensityOperator evolve(const DensityOperator &rho, const Operator &hamiltonian, double dt) {
    return Propagator(hamiltonian).evolve(rho, dt);
}

DensityOperator conjugate(const DensityOperator &rho, const Matrix &unitary) {
    const Matrix out = unitary * rho.matrix() * unitary.adjoint();
    return detail::assume_valid(rho.layout(), out);
}

// ---------------------------------------------------------------------------
// Random states

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over a stream-shifted key
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

static Matrix ginibre(std::size_t rows, std::size_t cols, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    }
    return g;
}

Matrix haar_unitary(std::size_t n, Rng &rng) {
    const Matrix g = ginibre(n, n, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const Complex d = r(j, j);
        const double a = std::abs(d);
        if (a > 0.0) {
            q.col(j) *= d / a;
        }
    }
    return q;
}

Vector haar_vector(std::size_t n, Rng &rng) {
    Vector v = ginibre(n, 1, rng).col(0);
    return v / v.norm();
}

DensityOperator random_state(const SpaceLayout &layout, std::size_t rank, Rng &rng) {
    const auto d = layout.total_dim();
    if (rank < 1 || rank > d) {
        throw Error("random_state: rank " + std::to_string(rank) + " outside [1, " +
                    std::to_string(d) + "]");
    }
    if (rank == 1) {
        return DensityOperator::pure(layout, haar_vector(d, rng));
    }
    const Matrix g = ginibre(d, rank, rng);
    const Matrix w = g * g.adjoint();
    return detail::assume_valid(layout, w);
}

DensityOperator random_state(const SpaceLayout &layout, std::size_t rank, std::uint64_t seed) {
    Rng rng(seed);
    return random_state(layout, rank, rng);
}

namespace pauli {
Matrix I() { return Matrix::Identity(2, 2); }
Matrix X() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
Matrix Y() {
    Matrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}
Matrix Z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}
} // namespace pauli

} // namespace reduxon
