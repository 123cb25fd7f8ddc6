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
 * Tensor-product Hilbert-space bookkeeping and dense complex operator algebra.
 *
 * Every operator carries the SpaceLayout it acts on. Subsystem indices are
 * 0-based and the first subsystem is the most significant factor of the
 * Kronecker product, so a basis index decomposes row-major over `dims`.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace reduxon {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised when an operation's inputs violate a documented invariant.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double herm = 1e-10;
    double psd = 1e-9;
    double trace = 1e-9;
    double eq = 1e-9;
};

inline constexpr Tolerances kDefaultTolerances{};

/// Largest total dimension the dense representation is meant for.
inline constexpr std::size_t kMaxDenseDim = 1024;

class SpaceLayout {
  public:
    SpaceLayout() = default;
    explicit SpaceLayout(std::vector<std::size_t> dims);

    [[nodiscard]] const std::vector<std::size_t> &dims() const { return dims_; }
    [[nodiscard]] std::size_t dim(std::size_t k) const { return dims_.at(k); }
    [[nodiscard]] std::size_t total_dim() const { return total_; }
    [[nodiscard]] std::size_t subsystem_count() const { return dims_.size(); }

    /// Layout of the listed subsystems, in increasing index order.
    [[nodiscard]] SpaceLayout restrict_to(std::span<const std::size_t> subset) const;
    /// Sorted indices not contained in `subset`.
    [[nodiscard]] std::vector<std::size_t>
    complement(std::span<const std::size_t> subset) const;
    /// Sorted, deduplicated, range-checked copy of `subset`.
    [[nodiscard]] std::vector<std::size_t>
    normalize_subset(std::span<const std::size_t> subset) const;
    [[nodiscard]] std::vector<std::size_t> all_indices() const;

    friend bool operator==(const SpaceLayout &, const SpaceLayout &) = default;

  private:
    std::vector<std::size_t> dims_;
    std::size_t total_ = 1;
};

class Operator {
  public:
    Operator() = default;
    Operator(SpaceLayout layout, Matrix matrix);

    static Operator identity(const SpaceLayout &layout);
    static Operator zero(const SpaceLayout &layout);

    [[nodiscard]] const SpaceLayout &layout() const { return layout_; }
    [[nodiscard]] const Matrix &matrix() const { return matrix_; }
    [[nodiscard]] std::size_t dim() const { return layout_.total_dim(); }

    [[nodiscard]] Complex trace() const { return matrix_.trace(); }
    [[nodiscard]] Operator adjoint() const;
    /// max_ij |M - M^dagger|
    [[nodiscard]] double hermiticity_defect() const;
    [[nodiscard]] bool is_hermitian(double tol = kDefaultTolerances.herm) const;

    Operator operator+(const Operator &other) const;
    Operator operator-(const Operator &other) const;
    Operator operator*(const Operator &other) const;
    Operator operator*(Complex scalar) const;

  private:
    SpaceLayout layout_;
    Matrix matrix_;
};

class DensityOperator;

namespace detail {
/// Symmetrizes and renormalizes without the spectral check. Only for results
/// that are positive by construction (conjugations, compressions, partial
/// traces of valid states).
DensityOperator assume_valid(const SpaceLayout &layout, const Matrix &m);
} // namespace detail

/// Hermitian, positive semidefinite, unit trace. Immutable once built.
class DensityOperator {
  public:
    DensityOperator() = default;

    /// Validates `m`. Eigenvalues in [-tol.psd, 0) are clipped to zero and the
    /// trace renormalized; anything more negative throws.
    static DensityOperator from_matrix(const SpaceLayout &layout, const Matrix &m,
                                       const Tolerances &tol = kDefaultTolerances);
    static DensityOperator from_operator(const Operator &op,
                                         const Tolerances &tol = kDefaultTolerances);
    static DensityOperator pure(const SpaceLayout &layout, const Vector &psi);
    static DensityOperator maximally_mixed(const SpaceLayout &layout);

    [[nodiscard]] const SpaceLayout &layout() const { return op_.layout(); }
    [[nodiscard]] const Matrix &matrix() const { return op_.matrix(); }
    [[nodiscard]] const Operator &as_operator() const { return op_; }
    [[nodiscard]] std::size_t dim() const { return op_.dim(); }
    [[nodiscard]] double purity() const;

  private:
    friend DensityOperator detail::assume_valid(const SpaceLayout &, const Matrix &);
    explicit DensityOperator(Operator op) : op_(std::move(op)) {}
    Operator op_;
};

struct EigenSystem {
    RealVector values; ///< ascending
    Matrix vectors;    ///< columns are eigenvectors
};

/// Hermitian eigendecomposition, eigenvalues ascending.
EigenSystem eigh(const Matrix &m, double herm_tol = kDefaultTolerances.herm);

Operator tensor(const Operator &a, const Operator &b);

/// Places `op` on the subsystems listed in `subset` (sorted) and identity
/// elsewhere. `op` must act on `layout.restrict_to(subset)`.
Operator embed(const Operator &op, const SpaceLayout &layout,
               std::span<const std::size_t> subset);
Operator embed(const Operator &op_k, const SpaceLayout &layout, std::size_t k);

/// Builds the operator a (on subsystems `subset_a`) tensored with b (on the
/// complement), with factors interleaved according to subsystem order.
Operator combine(const Operator &a, std::span<const std::size_t> subset_a,
                 const Operator &b, const SpaceLayout &layout);

/// Partial trace over the subsystems in `traced`; the result lives on the
/// complementary layout. Tracing over everything yields a 1x1 operator.
Operator partial_trace(const Operator &op, std::span<const std::size_t> traced);
DensityOperator partial_trace(const DensityOperator &rho,
                              std::span<const std::size_t> traced);

/// Applies `fn` to the eigenvalues of a Hermitian operator.
Operator herm_fn(const Operator &op, const std::function<double(double)> &fn);
Operator herm_fn(const Matrix &m, const SpaceLayout &layout,
                 const std::function<double(double)> &fn);

/// x ln x with the 0 ln 0 = 0 convention; negative roundoff clipped.
double xlnx(double x);

/// exp(-i H t), reusing one eigendecomposition of H for any number of times.
class Propagator {
  public:
    explicit Propagator(const Operator &hamiltonian);

    [[nodiscard]] Matrix unitary(double dt) const;
    [[nodiscard]] DensityOperator evolve(const DensityOperator &rho, double dt) const;
    [[nodiscard]] const SpaceLayout &layout() const { return layout_; }

  private:
    SpaceLayout layout_;
    RealVector energies_;
    Matrix basis_;
    bool diagonal_ = false;
};

/// rho(t+dt) = U rho U^dagger, U = exp(-i H dt), hbar = 1.
DensityOperator evolve(const DensityOperator &rho, const Operator &hamiltonian, double dt);

/// Conjugates rho by a unitary, revalidating the result.
DensityOperator conjugate(const DensityOperator &rho, const Matrix &unitary);

/// Deterministic engine used across the library.
using Rng = std::mt19937_64;

/// Derives an independent stream seed from (seed, stream index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Haar-distributed unitary of size n (QR of a Ginibre matrix, phase-fixed).
Matrix haar_unitary(std::size_t n, Rng &rng);
Vector haar_vector(std::size_t n, Rng &rng);

/// rank 1: Haar-random pure state; rank > 1: normalized Wishart G G^dagger with
/// G of shape total_dim x rank.
DensityOperator random_state(const SpaceLayout &layout, std::size_t rank, std::uint64_t seed);
DensityOperator random_state(const SpaceLayout &layout, std::size_t rank, Rng &rng);

/// Standard single-qubit operators.
namespace pauli {
Matrix I();
Matrix X();
Matrix Y();
Matrix Z();
} // namespace pauli

} // namespace reduxon
