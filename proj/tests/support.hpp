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

// Test-only generators and independent oracles. Nothing here calls into the
// library code paths that the oracles are used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "reduxon/hilbert.hpp"
#include "reduxon/projector.hpp"

namespace reduxon::testing {

inline double max_abs(const Matrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Matrix random_matrix(std::size_t n, Rng &rng) {
    std::normal_distribution<double> normal;
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(i, j) = Complex(normal(rng), normal(rng));
        }
    }
    return m;
}

inline Matrix random_hermitian(std::size_t n, Rng &rng) {
    const Matrix g = random_matrix(n, rng);
    return 0.5 * (g + g.adjoint());
}

/// Random composition of n into positive parts.
inline std::vector<std::size_t> random_ranks(std::size_t n, Rng &rng, std::size_t min_blocks = 1) {
    std::vector<std::size_t> ranks;
    std::size_t left = n;
    while (left > 0) {
        std::uniform_int_distribution<std::size_t> pick(1, left);
        std::size_t r = pick(rng);
        if (ranks.size() + 1 < min_blocks && r == left && left > 1) {
            r = left - 1;
        }
        ranks.push_back(r);
        left -= r;
    }
    std::shuffle(ranks.begin(), ranks.end(), rng);
    return ranks;
}

/// Total projector set from a Haar basis and random block ranks.
inline ProjectorSet random_total_pset(const SpaceLayout &layout, Rng &rng, std::size_t min_blocks = 2) {
    const auto n = layout.total_dim();
    const auto ranks = random_ranks(n, rng, std::min(min_blocks, n));
    return basis_partition(layout, Operator(layout, haar_unitary(n, rng)), ranks);
}

/// Partial set on the given active subsystems with a single Haar basis on A.
inline ProjectorSet random_partial_pset(const SpaceLayout &layout, std::span<const std::size_t> active,
                                        Rng &rng, std::size_t min_blocks = 2) {
    const SpaceLayout la = layout.restrict_to(active);
    const auto n = la.total_dim();
    const auto ranks = random_ranks(n, rng, std::min(min_blocks, n));
    const auto local = basis_partition(la, Operator(la, haar_unitary(n, rng)), ranks);
    return ProjectorSet::partial(layout, active, local.projectors());
}

// ---------------------------------------------------------------------------
// Oracles

/// (a (x) b)[i*db + p, j*db + q] = a[i, j] b[p, q], by explicit loops.
inline Matrix kron_index_formula(const Matrix &a, const Matrix &b) {
    const auto db = b.rows();
    Matrix out(a.rows() * db, a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index p = 0; p < b.rows(); ++p)
                for (Eigen::Index q = 0; q < b.cols(); ++q)
                    out(i * db + p, j * b.cols() + q) = a(i, j) * b(p, q);
    return out;
}

/// exp(m) from a truncated Taylor series of the given order, with scaling and
/// squaring by 2^squarings.
inline Matrix expm_series(const Matrix &m, int order, int squarings = 0) {
    const Matrix a = m / std::ldexp(1.0, squarings);
    Matrix term = Matrix::Identity(m.rows(), m.cols());
    Matrix sum = term;
    for (int k = 1; k <= order; ++k) {
        term = term * a / static_cast<double>(k);
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) {
        sum = sum * sum;
    }
    return sum;
}

/// Digits of a basis index, most significant subsystem first.
inline std::vector<std::size_t> digits_of(std::size_t index, const std::vector<std::size_t> &dims) {
    std::vector<std::size_t> d(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        d[k] = index % dims[k];
        index /= dims[k];
    }
    return d;
}

/// Partial trace by enumerating every (row, col) pair of the full matrix and
/// accumulating entries whose traced digits agree.
inline Matrix partial_trace_by_digits(const Matrix &m, const std::vector<std::size_t> &dims,
                                      const std::vector<bool> &traced) {
    std::vector<std::size_t> kept_dims;
    for (std::size_t k = 0; k < dims.size(); ++k)
        if (!traced[k]) kept_dims.push_back(dims[k]);
    std::size_t nk = 1;
    for (auto d : kept_dims) nk *= d;
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(nk), static_cast<Eigen::Index>(nk));
    auto kept_index = [&](const std::vector<std::size_t> &digits) {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < dims.size(); ++k)
            if (!traced[k]) idx = idx * dims[k] + digits[k];
        return idx;
    };
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const auto dr = digits_of(static_cast<std::size_t>(r), dims);
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const auto dc = digits_of(static_cast<std::size_t>(c), dims);
            bool same = true;
            for (std::size_t k = 0; k < dims.size(); ++k)
                if (traced[k] && dr[k] != dc[k]) same = false;
            if (same)
                out(static_cast<Eigen::Index>(kept_index(dr)), static_cast<Eigen::Index>(kept_index(dc))) +=
                    m(r, c);
        }
    }
    return out;
}

inline std::vector<double> sorted_eigenvalues(const Matrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(v.begin(), v.end());
    return v;
}

/// Entropy from eigenvalues, computed independently of the library.
inline double entropy_oracle(const Matrix &rho) {
    double s = 0.0;
    for (double l : sorted_eigenvalues(rho))
        if (l > 0.0) s -= l * std::log(l);
    return s;
}

} // namespace reduxon::testing
