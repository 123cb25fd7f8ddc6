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

#include "reduxon/metrics.hpp"
#include "support.hpp"

using namespace reduxon;
using reduxon::testing::max_abs;

namespace {

const SpaceLayout kQubit({2});

DensityOperator diag_state(const SpaceLayout &l, std::initializer_list<double> v) {
    RealVector d(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) d(i++) = x;
    return DensityOperator::from_matrix(l, d.cast<Complex>().asDiagonal());
}

ProjectorSet z_partition(const SpaceLayout &l) {
    std::vector<std::size_t> ones(l.total_dim(), 1);
    return basis_partition(l, Operator::identity(l), ones);
}

double trace_norm(const Matrix &m) {
    double s = 0.0;
    for (double v : testing::sorted_eigenvalues(m)) s += std::abs(v);
    return s;
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("trace_distance") {
    CHECK(trace_distance(diag_state(kQubit, {0.6, 0.4}), diag_state(kQubit, {0.6, 0.4})) == 0.0);
    CHECK(trace_distance(diag_state(kQubit, {1, 0}), diag_state(kQubit, {0, 1})) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(trace_distance(diag_state(kQubit, {0.6, 0.4}), diag_state(kQubit, {0.5, 0.5})) - 0.1) <= 1e-15);
    CHECK_THROWS_AS(trace_distance(diag_state(kQubit, {1, 0}), diag_state(SpaceLayout({3}), {1, 0, 0})), Error);

    SUBCASE("metric axioms on random triples") {
        Rng rng(109);
        const SpaceLayout l({2, 2});
        for (int trial = 0; trial < 100; ++trial) {
            const auto a = random_state(l, 1 + static_cast<std::size_t>(trial % 4), rng);
            const auto b = random_state(l, 2, rng);
            const auto c = random_state(l, 4, rng);
            const double ab = trace_distance(a, b);
            CHECK(std::abs(ab - trace_distance(b, a)) <= 1e-14);
            CHECK(ab >= 0.0);
            CHECK(ab <= 1.0);
            CHECK(ab <= trace_distance(a, c) + trace_distance(c, b) + 1e-12);
            CHECK(trace_distance(a, a) <= 1e-10);
            CHECK(std::abs(ab - 0.5 * trace_norm(a.matrix() - b.matrix())) <= 1e-12);
        }
    }
}

TEST_CASE("fidelity") {
    CHECK(std::abs(fidelity(diag_state(kQubit, {0.3, 0.7}), diag_state(kQubit, {0.3, 0.7})) - 1.0) <= 1e-12);
    CHECK(fidelity(diag_state(kQubit, {1, 0}), diag_state(kQubit, {0, 1})) <= 1e-15);

    SUBCASE("pure state against its Lueders mix and branches") {
        Rng rng(113);
        const SpaceLayout l({2, 3});
        for (int trial = 0; trial < 30; ++trial) {
            const auto p = testing::random_total_pset(l, rng);
            const auto rho = random_state(l, 1, rng);
            const auto w = weights(rho, p);
            double sum_sq = 0.0;
            for (double x : w.values()) sum_sq += x * x;
            CHECK(std::abs(fidelity(rho, lueders_mix(rho, p)) - sum_sq) <= 1e-10);
            for (auto i : vn_hat(rho, p).branch_indices()) {
                CHECK(std::abs(fidelity(rho, lueders_branch(rho, p, i)) - w[i]) <= 1e-10);
            }
        }
    }
    SUBCASE("symmetry, range, pure overlap and the unit-fidelity criterion") {
        Rng rng(127);
        const SpaceLayout l({3});
        for (int trial = 0; trial < 50; ++trial) {
            const auto a = random_state(l, 1 + static_cast<std::size_t>(trial % 3), rng);
            const auto b = random_state(l, 1 + static_cast<std::size_t>((trial + 1) % 3), rng);
            const double f = fidelity(a, b);
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            CHECK(std::abs(f - fidelity(b, a)) <= 1e-9);
            if (trial % 3 == 0) CHECK(std::abs(f - (a.matrix() * b.matrix()).trace().real()) <= 1e-10);
            CHECK((fidelity(a, a) >= 1.0 - 1e-9) == (trace_distance(a, a) <= 1e-9));
            CHECK((f >= 1.0 - 1e-9) == (trace_distance(a, b) <= 1e-4));
        }
    }
}

TEST_CASE("bound_check") {
    SUBCASE("identical states") {
        const auto rho = diag_state(kQubit, {1, 0});
        const auto r = bound_check(rho, rho, true);
        CHECK(r.value <= 1e-15);
        CHECK(*r.lower_bound <= 1e-15);
        CHECK(*r.upper_bound <= 1e-7);
        CHECK(r.contained());
    }
    SUBCASE("dominant outcome expansion") {
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            Vector psi(2);
            psi << std::sqrt(1.0 - eps), std::sqrt(eps);
            const auto rho = DensityOperator::pure(kQubit, psi);
            const auto z = z_partition(kQubit);
            const auto r = bound_check(rho, lueders_mix(rho, z), true);
            CHECK(r.contained(1e-12));
            CHECK(r.value >= 2 * eps - 2 * eps * eps - 1e-12);
            CHECK(r.value <= std::sqrt(2 * eps - eps * eps) + 1e-12);
            CHECK(std::abs(*r.lower_bound - (2 * eps - 2 * eps * eps)) <= 1e-9);
        }
    }
    SUBCASE("randomized sweep") {
        Rng rng(131);
        std::uniform_int_distribution<std::size_t> dim(2, 16);
        std::size_t violations = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const SpaceLayout l({dim(rng)});
            const bool pure = trial % 2 == 0;
            const auto a = random_state(l, pure ? 1 : 2, rng);
            const auto b = random_state(l, 1 + static_cast<std::size_t>(trial % 3) % l.total_dim(), rng);
            if (!bound_check(a, b, pure).contained(1e-9)) ++violations;
        }
        CHECK(violations == 0);
    }
    SUBCASE("pure flag on a mixed state") {
        CHECK_THROWS_AS(bound_check(diag_state(kQubit, {0.5, 0.5}), diag_state(kQubit, {1, 0}), true), Error);
    }
}

TEST_CASE("pseudometric") {
    Rng rng(137);
    const SpaceLayout l({2, 2});
    SUBCASE("identity gives zero") {
        const std::vector<Operator> q{Operator::identity(l)};
        CHECK(pseudometric(random_state(l, 2, rng), random_state(l, 3, rng), q) <= 1e-15);
    }
    SUBCASE("same class gives zero") {
        const auto p = testing::random_total_pset(l, rng);
        const auto rho = random_state(l, 3, rng);
        CHECK(pseudometric(rho, vn_hat(rho, p).hat, p) <= 1e-12);
        CHECK(pseudometric(rho, class_member(rho, p, 4), p) <= 1e-12);
    }
    SUBCASE("bounded by the trace distance, non-orthogonal sets") {
        for (int trial = 0; trial < 500; ++trial) {
            std::vector<Operator> q;
            for (int k = 0; k < 3; ++k) {
                const Matrix u = haar_unitary(4, rng);
                const Eigen::Index r = 1 + (trial + k) % 3;
                q.emplace_back(l, u.leftCols(r) * u.leftCols(r).adjoint());
            }
            const auto a = random_state(l, 1 + static_cast<std::size_t>(trial % 4), rng);
            const auto b = random_state(l, 1 + static_cast<std::size_t>((trial + 2) % 4), rng);
            CHECK(pseudometric(a, b, q) <= trace_distance(a, b) + 1e-12);
        }
    }
    SUBCASE("non-projector member") {
        const std::vector<Operator> q{Operator(l, 0.5 * Matrix::Identity(4, 4))};
        CHECK_THROWS_AS(pseudometric(random_state(l, 2, rng), random_state(l, 2, rng), q), Error);
    }
}

TEST_CASE("class_distance") {
    const SpaceLayout l({2, 2});
    const auto z = z_partition(l);
    SUBCASE("identical weights") {
        const auto a = vn_hat(diag_state(l, {0.1, 0.2, 0.3, 0.4}), z);
        CHECK(class_distance(a, a) == 0.0);
    }
    SUBCASE("disjoint weights") {
        const auto a = vn_hat(diag_state(kQubit, {1, 0}), z_partition(kQubit));
        const auto b = vn_hat(diag_state(kQubit, {0, 1}), z_partition(kQubit));
        CHECK(class_distance(a, b) == doctest::Approx(1.0));
    }
    SUBCASE("representative versus one branch") {
        Rng rng(139);
        for (int trial = 0; trial < 20; ++trial) {
            const auto p = testing::random_total_pset(l, rng);
            const auto rho = random_state(l, 2, rng);
            const auto hat = vn_hat(rho, p);
            for (auto i : hat.branch_indices()) {
                const auto branch = vn_hat(vndlp_branch(p, i), p);
                CHECK(std::abs(class_distance(hat, branch) - (1.0 - hat.weights[i])) <= 1e-12);
                CHECK(std::abs(class_distance(hat, branch) - trace_distance(hat.hat, branch.hat)) <= 1e-12);
            }
        }
    }
    SUBCASE("partial sets use the representatives") {
        Rng rng(149);
        const std::size_t active[] = {0};
        const auto p = testing::random_partial_pset(l, active, rng);
        const auto a = partial_hat(random_state(l, 2, rng), p);
        const auto b = partial_hat(random_state(l, 3, rng), p);
        CHECK(std::abs(class_distance(a, b) - trace_distance(a.hat, b.hat)) <= 1e-15);
    }
    SUBCASE("mismatched sets") {
        Rng rng(151);
        const auto other = testing::random_total_pset(l, rng);
        const auto rho = random_state(l, 2, rng);
        CHECK_THROWS_AS(class_distance(vn_hat(rho, z), vn_hat(rho, other)), Error);
    }
}

TEST_CASE("class_equal and class_member") {
    Rng rng(157);
    SUBCASE("a state is in the class of its representative") {
        const SpaceLayout l({2, 3});
        for (int trial = 0; trial < 20; ++trial) {
            const bool total = trial % 2 == 0;
            const std::size_t active[] = {1};
            const auto p = total ? testing::random_total_pset(l, rng) : testing::random_partial_pset(l, active, rng);
            const auto rho = random_state(l, 3, rng);
            CHECK(class_equal(rho, reduce(rho, p).hat, p));
        }
    }
    SUBCASE("qubit with rank-one blocks only picks up phases") {
        const auto z = z_partition(kQubit);
        const auto rho = random_state(kQubit, 1, rng);
        const auto sigma = class_member(rho, z, 8);
        CHECK(class_equal(rho, sigma, z));
        for (Eigen::Index i = 0; i < 2; ++i) CHECK(std::abs(sigma.matrix()(i, i) - rho.matrix()(i, i)) <= 1e-14);
        CHECK(std::abs(std::abs(sigma.matrix()(0, 1)) - std::abs(rho.matrix()(0, 1))) <= 1e-14);
    }
    SUBCASE("rank-two blocks move the state but not its class") {
        const SpaceLayout l({4});
        const std::size_t ranks[] = {2, 2};
        const auto p = basis_partition(l, Operator(l, haar_unitary(4, rng)), ranks);
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto rho = random_state(l, 2, rng);
            const auto sigma = class_member(rho, p, seed);
            CHECK(trace_distance(rho, sigma) > 1e-6);
            CHECK(class_equal(rho, sigma, p));
            CHECK(max_abs(vn_hat(rho, p).hat.matrix() - vn_hat(sigma, p).hat.matrix()) <= 1e-10);
        }
    }
    SUBCASE("block-unitary conjugation on A, identity on B") {
        const SpaceLayout l({4, 2});
        const std::size_t active[] = {0};
        const SpaceLayout la({4});
        const std::size_t ranks[] = {2, 2};
        const Matrix basis = haar_unitary(4, rng);
        const auto local = basis_partition(la, Operator(la, basis), ranks);
        const auto p = ProjectorSet::partial(l, active, local.projectors());
        Matrix block = Matrix::Zero(4, 4);
        block.topLeftCorner(2, 2) = haar_unitary(2, rng);
        block.bottomRightCorner(2, 2) = haar_unitary(2, rng);
        const Matrix u_a = basis * block * basis.adjoint();
        const Matrix u = testing::kron_index_formula(u_a, Matrix::Identity(2, 2));
        const auto rho = random_state(l, 3, rng);
        const auto sigma = DensityOperator::from_matrix(l, u * rho.matrix() * u.adjoint());
        CHECK(class_equal(rho, sigma, p));
        CHECK(max_abs(partial_hat(rho, p).hat.matrix() - partial_hat(sigma, p).hat.matrix()) <= 1e-10);
    }
    SUBCASE("shifted weight breaks equality") {
        const SpaceLayout l({2, 2});
        const auto z = z_partition(l);
        const auto a = diag_state(l, {0.1, 0.2, 0.3, 0.4});
        const auto b = diag_state(l, {0.101, 0.2, 0.3, 0.399});
        CHECK_FALSE(class_equal(a, b, z));
    }
    SUBCASE("equality matches representative distance in both directions") {
        const SpaceLayout l({2, 2});
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t active[] = {0};
            const auto p = trial % 2 == 0 ? testing::random_total_pset(l, rng)
                                          : testing::random_partial_pset(l, active, rng);
            const auto rho = random_state(l, 3, rng);
            const auto sigma = trial % 4 < 2 ? class_member(rho, p, static_cast<std::uint64_t>(trial))
                                             : random_state(l, 2, rng);
            const double d = trace_distance(reduce(rho, p).hat, reduce(sigma, p).hat);
            CHECK(class_equal(rho, sigma, p) == (d <= 1e-8));
        }
    }
}

TEST_CASE("local_distance") {
    Rng rng(163);
    const SpaceLayout l({2, 3});
    const auto a = random_state(l, 2, rng);
    const auto b = random_state(l, 2, rng);
    const std::size_t sys[] = {0};
    const std::size_t traced[] = {1};
    CHECK(std::abs(local_distance(a, b, sys) - trace_distance(partial_trace(a, traced), partial_trace(b, traced))) <=
          1e-15);
    CHECK(local_distance(a, b, sys) <= trace_distance(a, b) + 1e-12);
}

} // TEST_SUITE
