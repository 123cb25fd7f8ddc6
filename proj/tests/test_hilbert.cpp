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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "reduxon/hilbert.hpp"
#include "support.hpp"

using namespace reduxon;
using reduxon::testing::max_abs;

namespace {

Matrix diag(std::initializer_list<double> v) {
    RealVector d(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) d(i++) = x;
    return d.cast<Complex>().asDiagonal();
}

} // namespace

TEST_SUITE("hilbert") {

TEST_CASE("layout bookkeeping") {
    const SpaceLayout l({2, 3, 4});
    CHECK(l.total_dim() == 24);
    const std::size_t sub[] = {2, 0};
    CHECK(l.restrict_to(sub).dims() == std::vector<std::size_t>{2, 4});
    CHECK(l.complement(sub) == std::vector<std::size_t>{1});
    CHECK_THROWS_AS(SpaceLayout({2, 0}), Error);
    const std::size_t bad[] = {3};
    CHECK_THROWS_AS((void)l.restrict_to(bad), Error);
    const std::size_t dup[] = {1, 1};
    CHECK_THROWS_AS((void)l.restrict_to(dup), Error);
}

TEST_CASE("tensor") {
    SUBCASE("identity factors") {
        const auto out = tensor(Operator::identity(SpaceLayout({2})), Operator::identity(SpaceLayout({3})));
        CHECK(out.layout().dims() == std::vector<std::size_t>{2, 3});
        CHECK(max_abs(out.matrix() - Matrix::Identity(6, 6)) == 0.0);
    }
    SUBCASE("diagonal product") {
        const auto out = tensor(Operator(SpaceLayout({2}), diag({1, 0})), Operator(SpaceLayout({2}), diag({1, 1})));
        CHECK(max_abs(out.matrix() - diag({1, 1, 0, 0})) == 0.0);
    }
    SUBCASE("index formula oracle") {
        Rng rng(11);
        const Matrix a = testing::random_matrix(2, rng);
        const Matrix b = testing::random_matrix(3, rng);
        const auto out = tensor(Operator(SpaceLayout({2}), a), Operator(SpaceLayout({3}), b));
        CHECK(max_abs(out.matrix() - testing::kron_index_formula(a, b)) == 0.0);
        // (a (x) b)(u (x) v) = (a u) (x) (b v)
        const Vector u = testing::random_matrix(2, rng).col(0);
        const Vector v = testing::random_matrix(3, rng).col(0);
        Vector uv(6), aubv(6);
        for (int i = 0; i < 2; ++i)
            for (int p = 0; p < 3; ++p) {
                uv(3 * i + p) = u(i) * v(p);
                aubv(3 * i + p) = (a * u)(i) * (b * v)(p);
            }
        CHECK((out.matrix() * uv - aubv).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("embed") {
    const SpaceLayout l({2, 2});
    SUBCASE("identity") {
        CHECK(max_abs(embed(Operator::identity(SpaceLayout({2})), l, 0).matrix() - Matrix::Identity(4, 4)) == 0.0);
    }
    SUBCASE("trace scales with the complementary dimension") {
        const Operator p(SpaceLayout({2}), diag({1, 0}));
        const auto e = embed(p, l, 0);
        CHECK(e.trace().real() == doctest::Approx(2.0));
        CHECK(p.trace().real() == doctest::Approx(1.0));
        const SpaceLayout l3({2, 3, 5});
        const Operator q(SpaceLayout({3}), diag({1, 1, 0}));
        CHECK(embed(q, l3, 1).trace().real() == doctest::Approx(2.0 * 2 * 5));
    }
    SUBCASE("disjoint embeds commute") {
        Rng rng(3);
        const SpaceLayout l3({2, 3, 2});
        const auto a = embed(Operator(SpaceLayout({2}), testing::random_matrix(2, rng)), l3, 0);
        const auto b = embed(Operator(SpaceLayout({2}), testing::random_matrix(2, rng)), l3, 2);
        CHECK(max_abs((a * b - b * a).matrix()) <= 1e-12);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(embed(Operator::identity(SpaceLayout({2})), l, 2), Error);
        CHECK_THROWS_AS(embed(Operator::identity(SpaceLayout({3})), l, 0), Error);
    }
}

TEST_CASE("partial trace") {
    Rng rng(5);
    SUBCASE("product state") {
        const auto ra = random_state(SpaceLayout({2}), 2, rng);
        const auto rb = random_state(SpaceLayout({3}), 2, rng);
        const auto prod = DensityOperator::from_operator(tensor(ra.as_operator(), rb.as_operator()));
        const std::size_t a[] = {0};
        const std::size_t b[] = {1};
        CHECK(max_abs(partial_trace(prod, a).matrix() - rb.matrix()) <= 1e-12);
        CHECK(max_abs(partial_trace(prod, b).matrix() - ra.matrix()) <= 1e-12);
    }
    SUBCASE("Bell state gives the maximally mixed qubit") {
        Vector psi = Vector::Zero(4);
        psi(0) = psi(3) = 1.0;
        const auto bell = DensityOperator::pure(SpaceLayout({2, 2}), psi);
        const std::size_t a[] = {0};
        CHECK(max_abs(partial_trace(bell, a).matrix() - 0.5 * Matrix::Identity(2, 2)) <= 1e-15);
    }
    SUBCASE("duality with embedded observables") {
        const SpaceLayout l({2, 2, 2});
        const auto rho = random_state(l, 8, rng);
        const std::size_t traced[] = {0, 1};
        const auto reduced = partial_trace(rho, traced);
        for (int trial = 0; trial < 50; ++trial) {
            const Operator xb(SpaceLayout({2}), testing::random_hermitian(2, rng));
            const Complex lhs = (reduced.matrix() * xb.matrix()).trace();
            const Complex rhs = (rho.matrix() * embed(xb, l, 2).matrix()).trace();
            CHECK(std::abs(lhs - rhs) <= 1e-12);
        }
    }
    SUBCASE("digit-enumeration oracle on a non-contiguous subset") {
        const SpaceLayout l({2, 3, 2});
        const auto rho = random_state(l, 5, rng);
        const std::size_t traced[] = {0, 2};
        const Matrix expect = testing::partial_trace_by_digits(rho.matrix(), l.dims(), {true, false, true});
        CHECK(max_abs(partial_trace(rho, traced).matrix() - expect) <= 1e-14);
    }
    SUBCASE("tracing everything leaves the trace") {
        const auto rho = random_state(SpaceLayout({2, 3}), 3, rng);
        const std::size_t all[] = {0, 1};
        const auto scalar = partial_trace(rho.as_operator(), all);
        CHECK(scalar.dim() == 1);
        CHECK(std::abs(scalar.matrix()(0, 0) - 1.0) <= 1e-12);
    }
    SUBCASE("partial trace of a tensor product recovers the factors") {
        for (int trial = 0; trial < 10; ++trial) {
            const auto ra = random_state(SpaceLayout({3}), 1 + trial % 3, rng);
            const auto rb = random_state(SpaceLayout({2, 2}), 1 + trial % 4, rng);
            const auto prod = DensityOperator::from_operator(tensor(ra.as_operator(), rb.as_operator()));
            const std::size_t a[] = {0};
            CHECK(max_abs(partial_trace(prod, a).matrix() - rb.matrix()) <= 1e-12);
        }
    }
    SUBCASE("invalid subset") {
        const auto rho = random_state(SpaceLayout({2, 2}), 2, rng);
        const std::size_t bad[] = {4};
        CHECK_THROWS_AS(partial_trace(rho, bad), Error);
    }
}

TEST_CASE("evolve") {
    Rng rng(17);
    const SpaceLayout q({2});
    const auto rho = random_state(q, 2, rng);
    const Operator h(q, pauli::Z());
    SUBCASE("dt = 0 is the identity") {
        CHECK(max_abs(evolve(rho, h, 0.0).matrix() - rho.matrix()) == 0.0);
    }
    SUBCASE("stationary states") {
        const auto diag_state = DensityOperator::from_matrix(q, diag({0.3, 0.7}));
        for (double dt : {0.1, 1.0, 17.3}) {
            CHECK(max_abs(evolve(diag_state, h, dt).matrix() - diag_state.matrix()) <= 1e-14);
        }
    }
    SUBCASE("series oracle for sigma_z, dt = pi/3") {
        const double dt = std::numbers::pi / 3.0;
        const Matrix u = testing::expm_series(Complex(0, -dt) * pauli::Z(), 8, 12);
        const Matrix expect = u * rho.matrix() * u.adjoint();
        CHECK(max_abs(evolve(rho, h, dt).matrix() - expect) <= 1e-12);
    }
    SUBCASE("dense Hamiltonian: spectrum and entropy preserved") {
        const SpaceLayout l({2, 3});
        const Operator hh(l, testing::random_hermitian(6, rng));
        const auto r = random_state(l, 4, rng);
        const auto out = evolve(r, hh, 2.7);
        const auto before = testing::sorted_eigenvalues(r.matrix());
        const auto after = testing::sorted_eigenvalues(out.matrix());
        for (std::size_t i = 0; i < before.size(); ++i) CHECK(std::abs(before[i] - after[i]) <= 1e-10);
        CHECK(std::abs(testing::entropy_oracle(r.matrix()) - testing::entropy_oracle(out.matrix())) <= 1e-10);
        const Matrix u = testing::expm_series(Complex(0, -2.7) * hh.matrix(), 20, 12);
        CHECK(max_abs(out.matrix() - u * r.matrix() * u.adjoint()) <= 1e-10);
    }
    SUBCASE("non-Hermitian Hamiltonian") {
        Matrix bad = pauli::Z();
        bad(0, 1) = 1.0;
        CHECK_THROWS_AS(evolve(rho, Operator(q, bad), 1.0), Error);
    }
}

TEST_CASE("herm_fn") {
    const SpaceLayout q({2});
    SUBCASE("square root of a diagonal") {
        const auto out = herm_fn(Operator(q, diag({4, 9})), [](double x) { return std::sqrt(x); });
        CHECK(max_abs(out.matrix() - diag({2, 3})) <= 1e-14);
    }
    SUBCASE("x ln x with 0 ln 0 = 0") {
        const auto out = herm_fn(Operator(q, diag({1, 0})), xlnx);
        CHECK(max_abs(out.matrix()) <= 1e-15);
        CHECK(xlnx(0.0) == 0.0);
        CHECK(xlnx(-1e-18) == 0.0);
    }
    SUBCASE("sqrt squares back") {
        Rng rng(23);
        for (int trial = 0; trial < 20; ++trial) {
            const Matrix g = testing::random_matrix(5, rng);
            const Matrix m = g * g.adjoint();
            const Matrix s = herm_fn(Operator(SpaceLayout({5}), m), [](double x) { return std::sqrt(std::max(0.0, x)); }).matrix();
            CHECK(max_abs(s * s - m) <= 1e-9);
        }
    }
    SUBCASE("identity map") {
        Rng rng(29);
        const Matrix m = testing::random_hermitian(4, rng);
        CHECK(max_abs(herm_fn(Operator(SpaceLayout({4}), m), [](double x) { return x; }).matrix() - m) <= 1e-12);
    }
    SUBCASE("exp agrees with the series for norm <= 5") {
        Rng rng(31);
        for (int trial = 0; trial < 10; ++trial) {
            Matrix m = testing::random_hermitian(4, rng);
            Eigen::SelfAdjointEigenSolver<Matrix> es(m);
            m *= 5.0 / es.eigenvalues().cwiseAbs().maxCoeff();
            const auto out = herm_fn(Operator(SpaceLayout({4}), m), [](double x) { return std::exp(x); });
            const Matrix expect = testing::expm_series(m, 80);
            CHECK(max_abs(out.matrix() - expect) <= 1e-9 * std::max(1.0, max_abs(expect)));
        }
    }
    SUBCASE("non-Hermitian input") {
        Matrix bad = Matrix::Zero(2, 2);
        bad(0, 1) = 1.0;
        CHECK_THROWS_AS(herm_fn(Operator(q, bad), xlnx), Error);
    }
}

TEST_CASE("trace cyclicity") {
    Rng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = testing::random_matrix(6, rng);
        const Matrix b = testing::random_matrix(6, rng);
        const Matrix c = testing::random_matrix(6, rng);
        CHECK(std::abs((a * b * c).trace() - (b * c * a).trace()) <= 1e-10);
    }
}

TEST_CASE("random_state") {
    const SpaceLayout l({2, 3});
    SUBCASE("pure states") {
        const auto rho = random_state(l, 1, 99);
        CHECK(std::abs(rho.purity() - 1.0) <= 1e-10);
        CHECK(max_abs(rho.matrix() * rho.matrix() - rho.matrix()) <= 1e-10);
    }
    SUBCASE("determinism") {
        const auto a = random_state(l, 3, 1234);
        const auto b = random_state(l, 3, 1234);
        CHECK((a.matrix().array() == b.matrix().array()).all());
        const auto c = random_state(l, 3, 1235);
        CHECK(max_abs(a.matrix() - c.matrix()) > 0.0);
    }
    SUBCASE("full rank") {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto rho = random_state(l, 6, seed);
            CHECK(testing::sorted_eigenvalues(rho.matrix()).front() > 1e-12);
        }
    }
    SUBCASE("invalid rank") {
        CHECK_THROWS_AS(random_state(l, 0, 1), Error);
        CHECK_THROWS_AS(random_state(l, 7, 1), Error);
    }
}

TEST_CASE("density operator validation") {
    const SpaceLayout q({2});
    SUBCASE("roundoff negatives are clipped") {
        const auto rho = DensityOperator::from_matrix(q, diag({1.0 + 5e-10, -5e-10}));
        CHECK(testing::sorted_eigenvalues(rho.matrix()).front() >= 0.0);
        CHECK(std::abs(rho.matrix().trace().real() - 1.0) <= 1e-15);
    }
    SUBCASE("genuinely negative spectrum is rejected") {
        CHECK_THROWS_AS(DensityOperator::from_matrix(q, diag({1.1, -0.1})), Error);
    }
    SUBCASE("trace and Hermiticity") {
        CHECK_THROWS_AS(DensityOperator::from_matrix(q, diag({0.6, 0.6})), Error);
        Matrix m = diag({0.5, 0.5});
        m(0, 1) = 0.1;
        CHECK_THROWS_AS(DensityOperator::from_matrix(q, m), Error);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(DensityOperator::from_matrix(SpaceLayout({3}), diag({0.5, 0.5})), Error);
    }
}

} // TEST_SUITE
