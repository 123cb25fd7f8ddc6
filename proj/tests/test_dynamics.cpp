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

#include "reduxon/dynamics.hpp"
#include "reduxon/entropy_sieve.hpp"
#include "reduxon/metrics.hpp"
#include "support.hpp"

using namespace reduxon;
using reduxon::testing::max_abs;

namespace {

ProjectorSet z_partition(const SpaceLayout &l) {
    std::vector<std::size_t> ones(l.total_dim(), 1);
    return basis_partition(l, Operator::identity(l), ones);
}

ReductionEvent event(double t, ProjectorSet p, ReductionMode mode) {
    ReductionEvent e;
    e.t = t;
    e.pset = std::move(p);
    e.mode = mode;
    return e;
}

/// First grid time > t_min with |r| satisfying pred.
template <class Pred>
double first_time(const DephasingModel &m, double t_min, Pred pred) {
    for (double t = t_min; t < 50.0; t += 1e-3) {
        if (pred(std::abs(dephasing_factor(m, t)))) return t;
    }
    FAIL("no time found");
    return 0.0;
}

} // namespace

TEST_SUITE("dynamics") {

TEST_CASE("build_dephasing") {
    SUBCASE("one environment qubit, unit coupling") {
        const auto m = build_dephasing(std::vector<double>{1.0});
        Matrix expect = Matrix::Zero(4, 4);
        expect.diagonal() << 1, -1, -1, 1;
        CHECK(max_abs(m.hamiltonian.matrix() - expect) == 0.0);
        CHECK(m.layout.dims() == std::vector<std::size_t>{2, 2});
    }
    SUBCASE("seeded couplings are reproducible and in range") {
        const auto a = build_dephasing(5, 42);
        const auto b = build_dephasing(5, 42);
        CHECK(a.couplings == b.couplings);
        CHECK(build_dephasing(5, 43).couplings != a.couplings);
        for (double g : a.couplings) {
            CHECK(g >= 0.5);
            CHECK(g <= 1.5);
        }
    }
    SUBCASE("eight environment qubits: pure dephasing") {
        const auto m = build_dephasing(8, 3);
        CHECK(m.layout.total_dim() == 512);
        CHECK(m.hamiltonian.is_hermitian());
        const Operator sz = embed(Operator(SpaceLayout({2}), pauli::Z()), m.layout, 0);
        CHECK(max_abs((m.hamiltonian * sz - sz * m.hamiltonian).matrix()) <= 1e-12);
    }
    SUBCASE("limits") {
        CHECK_THROWS_AS(build_dephasing(0, 1), Error);
        CHECK_THROWS_AS(build_dephasing(10, 1), Error);
        CHECK_THROWS_AS(build_dephasing(std::vector<double>{}), Error);
    }
}

TEST_CASE("dephasing_factor") {
    CHECK(dephasing_factor(build_dephasing(6, 1), 0.0) == Complex(1.0, 0.0));
    CHECK(std::abs(dephasing_factor(build_dephasing(std::vector<double>{1.0}), std::numbers::pi / 4)) <= 1e-15);
    SUBCASE("matches the full simulation for eight environment qubits") {
        const auto m = build_dephasing(8, 2024);
        for (int k = 0; k < 50; ++k) {
            const double t = 3.0 * k / 49.0;
            CHECK(std::abs(simulated_coherence(m, t) - std::abs(dephasing_factor(m, t))) <= 1e-10);
        }
    }
    SUBCASE("decoherence time") {
        const auto m = build_dephasing(8, 7);
        const auto tau = decoherence_time(m, 10.0, 1e-3);
        REQUIRE(tau.has_value());
        CHECK(std::abs(dephasing_factor(m, *tau)) < 0.05);
        CHECK(std::abs(dephasing_factor(m, *tau - 1e-3)) >= 0.05);
        CHECK_FALSE(decoherence_time(build_dephasing(std::vector<double>{1.0}), 0.1, 1e-3).has_value());
    }
}

TEST_CASE("pointer model") {
    const auto m = build_pointer_model(2, 1.0, 9);
    CHECK(m.layout.dims() == std::vector<std::size_t>{2, 3, 2, 2});
    CHECK(m.hamiltonian.is_hermitian());
    const auto rho = m.initial_state();
    CHECK(std::abs(rho.purity() - 1.0) <= 1e-12);
    const Operator sz = embed(Operator(SpaceLayout({2}), pauli::Z()), m.layout, 0);
    CHECK(max_abs((m.hamiltonian * sz - sz * m.hamiltonian).matrix()) <= 1e-12);
}

TEST_CASE("qubit_partition") {
    const SpaceLayout l({2, 2});
    const auto z = qubit_partition(l, 0, 0.0);
    CHECK(z.active_set() == std::vector<std::size_t>{0});
    Matrix p0 = Matrix::Zero(4, 4);
    p0(0, 0) = p0(1, 1) = 1.0;
    CHECK(max_abs(z.projector(0).matrix() - p0) <= 1e-15);
    const auto x = qubit_partition(l, 1, std::numbers::pi / 2);
    CHECK(max_abs(x.active_projector(0).matrix() - Matrix::Constant(2, 2, 0.5)) <= 1e-15);
    CHECK_THROWS_AS(qubit_partition(SpaceLayout({3, 2}), 0, 0.0), Error);
}

TEST_CASE("reduction modes") {
    CHECK(parse_reduction_mode("partial") == ReductionMode::partial);
    CHECK(to_string(ReductionMode::vndlp) == "vndlp");
    CHECK(parse_reduction_mode(to_string(ReductionMode::lueders)) == ReductionMode::lueders);
    CHECK_THROWS_AS(parse_reduction_mode("collapse"), Error);
}

TEST_CASE("run_history") {
    Rng rng(191);
    const SpaceLayout l({2, 2});
    SUBCASE("no events: plain evolution") {
        HistorySchedule s;
        s.initial = random_state(l, 2, rng);
        s.hamiltonian = Operator(l, testing::random_hermitian(4, rng));
        s.t_end = 1.3;
        const auto rec = run_history(s, HistoryMode::mixture);
        CHECK(rec.event_weights.empty());
        CHECK_FALSE(rec.final_reduced.has_value());
        CHECK(max_abs(rec.final_state.matrix() - evolve(s.initial, s.hamiltonian, 1.3).matrix()) <= 1e-12);
    }
    SUBCASE("H = 0 and a repeated set: constant after the first event") {
        HistorySchedule s;
        s.initial = random_state(l, 3, rng);
        s.hamiltonian = Operator::zero(l);
        const auto p = testing::random_total_pset(l, rng);
        for (double t : {0.5, 1.0, 1.5}) s.events.push_back(event(t, p, ReductionMode::lueders));
        const auto rec = run_history(s, HistoryMode::mixture);
        REQUIRE(rec.event_weights.size() == 3);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(std::abs(rec.event_weights[2][i] - rec.event_weights[0][i]) <= 1e-12);
        }
        CHECK(max_abs(rec.final_state.matrix() - lueders_mix(s.initial, p).matrix()) <= 1e-12);
    }
    SUBCASE("vndlp mixture never lowers the entropy") {
        HistorySchedule s;
        s.initial = random_state(l, 1, rng);
        s.hamiltonian = Operator(l, testing::random_hermitian(4, rng));
        std::vector<ProjectorSet> psets;
        for (int k = 0; k < 4; ++k) psets.push_back(testing::random_total_pset(l, rng));
        double prev = entropy(s.initial);
        for (std::size_t n = 1; n <= psets.size(); ++n) {
            s.events.clear();
            for (std::size_t k = 0; k < n; ++k)
                s.events.push_back(event(0.3 * static_cast<double>(k + 1), psets[k], ReductionMode::vndlp));
            const double now = entropy(run_history(s, HistoryMode::mixture).final_state);
            CHECK(now >= prev - 1e-10);
            prev = now;
        }
    }
    SUBCASE("sampled branches reproduce the single-event weights") {
        const auto m = build_dephasing(3, 17);
        const double t1 = first_time(m, 0.0, [](double r) { return r < 0.05; });
        const double t2 = first_time(m, t1 + 0.5, [](double r) { return r < 0.05; });
        HistorySchedule s;
        s.initial = m.initial_state();
        s.hamiltonian = m.hamiltonian;
        const auto z = qubit_partition(m.layout, 0, 0.0);
        s.events = {event(t1, z, ReductionMode::partial), event(t2, z, ReductionMode::partial)};
        const std::size_t runs = 10000;
        std::size_t ones = 0;
        for (std::size_t r = 0; r < runs; ++r) {
            const auto rec = run_history(s, HistoryMode::sampling, derive_seed(77, r));
            REQUIRE(rec.sampled.size() == 2);
            CHECK(rec.sampled[0] == rec.sampled[1]);
            ones += rec.sampled[1];
        }
        const double f = static_cast<double>(ones) / static_cast<double>(runs);
        CHECK(std::abs(f - 0.5) <= 4.0 * std::sqrt(0.25 / static_cast<double>(runs)));
    }
    SUBCASE("sampling is deterministic under a seed") {
        HistorySchedule s;
        s.initial = random_state(l, 2, rng);
        s.hamiltonian = Operator(l, testing::random_hermitian(4, rng));
        const auto p = testing::random_total_pset(l, rng);
        s.events = {event(0.2, p, ReductionMode::lueders), event(0.9, p, ReductionMode::vndlp)};
        const auto a = run_history(s, HistoryMode::sampling, 5);
        const auto b = run_history(s, HistoryMode::sampling, 5);
        CHECK(a.sampled == b.sampled);
        CHECK(max_abs(a.final_state.matrix() - b.final_state.matrix()) == 0.0);
    }
    SUBCASE("schedule errors") {
        HistorySchedule s;
        s.initial = random_state(l, 2, rng);
        s.hamiltonian = Operator::zero(l);
        const auto p = testing::random_total_pset(l, rng);
        s.events = {event(1.0, p, ReductionMode::lueders), event(1.0, p, ReductionMode::lueders)};
        CHECK_THROWS_AS(run_history(s, HistoryMode::mixture), Error);
        s.events = {event(1.0, z_partition(SpaceLayout({4})), ReductionMode::lueders)};
        CHECK_THROWS_AS(run_history(s, HistoryMode::mixture), Error);
        s.events = {event(1.0, qubit_partition(l, 0, 0.0), ReductionMode::vndlp)};
        CHECK_THROWS_AS(run_history(s, HistoryMode::mixture), Error);
        s.events = {event(1.0, p, ReductionMode::partial)};
        CHECK_THROWS_AS(run_history(s, HistoryMode::mixture), Error);
        s.events = {event(-1.0, p, ReductionMode::lueders)};
        CHECK_THROWS_AS(run_history(s, HistoryMode::mixture), Error);
        s.hamiltonian = Operator::zero(SpaceLayout({4}));
        s.events.clear();
        CHECK_THROWS_AS(run_history(s, HistoryMode::mixture), Error);
    }
}

TEST_CASE("noninterference_defect") {
    Rng rng(193);
    const SpaceLayout l({2, 2});
    SUBCASE("commuting sets and Hamiltonian") {
        HistorySchedule s;
        s.initial = random_state(l, 2, rng);
        s.hamiltonian = Operator(l, Matrix(Vector::LinSpaced(4, -1.0, 2.0).asDiagonal()));
        const auto z = z_partition(l);
        s.events = {event(0.4, z, ReductionMode::lueders), event(1.1, qubit_partition(l, 0, 0.0), ReductionMode::partial),
                    event(2.0, z, ReductionMode::lueders)};
        CHECK(noninterference_defect(s) <= 1e-10);
    }
    SUBCASE("H = 0 with a repeated set") {
        HistorySchedule s;
        s.initial = random_state(l, 2, rng);
        s.hamiltonian = Operator::zero(l);
        const auto p = testing::random_total_pset(l, rng);
        s.events = {event(0.4, p, ReductionMode::lueders), event(1.0, p, ReductionMode::lueders)};
        CHECK(noninterference_defect(s) <= 1e-10);
    }
    SUBCASE("inserting a duplicate of an adjacent event changes nothing when H = 0") {
        HistorySchedule s;
        s.initial = random_state(l, 1, rng);
        s.hamiltonian = Operator::zero(l);
        const auto p = testing::random_total_pset(l, rng);
        const auto q = testing::random_total_pset(l, rng);
        s.events = {event(0.4, p, ReductionMode::lueders), event(1.0, q, ReductionMode::lueders)};
        const double before = noninterference_defect(s);
        s.events.insert(s.events.begin() + 1, event(0.7, p, ReductionMode::lueders));
        CHECK(std::abs(noninterference_defect(s) - before) <= 1e-12);
    }
    SUBCASE("dephasing contrast: late versus early intermediate reductions") {
        const auto m = build_dephasing(6, 21);
        const auto z = qubit_partition(m.layout, 0, 0.0);
        const auto x = qubit_partition(m.layout, 0, std::numbers::pi / 2);
        HistorySchedule s;
        s.initial = m.initial_state();
        s.hamiltonian = m.hamiltonian;
        const double late1 = first_time(m, 0.0, [](double r) { return r < 0.05; });
        const double late2 = first_time(m, late1 + 0.2, [](double r) { return r < 0.02; });
        s.events = {event(late1, z, ReductionMode::partial), event(late2, x, ReductionMode::partial)};
        const double late = noninterference_defect(s);
        CHECK(late < 0.01);
        CHECK(std::abs(late - 0.5 * std::abs(dephasing_factor(m, late2))) <= 1e-9);
        s.events = {event(0.01, z, ReductionMode::partial), event(0.03, x, ReductionMode::partial)};
        CHECK(std::abs(dephasing_factor(m, 0.03)) > 0.9);
        CHECK(noninterference_defect(s) > 0.1);
    }
    SUBCASE("fewer than two events") {
        HistorySchedule s;
        s.initial = random_state(l, 2, rng);
        s.hamiltonian = Operator::zero(l);
        s.events = {event(1.0, z_partition(l), ReductionMode::lueders)};
        CHECK_THROWS_AS(noninterference_defect(s), Error);
    }
}

TEST_CASE("stability_defect") {
    Rng rng(197);
    const SpaceLayout l({2, 2});
    SUBCASE("dt = 0 after a reduction") {
        const auto p = testing::random_total_pset(l, rng);
        const auto rho = lueders_mix(random_state(l, 2, rng), p);
        CHECK(stability_defect(rho, p, Operator(l, testing::random_hermitian(4, rng)), 0.0) <= 1e-12);
    }
    SUBCASE("commuting sets stay stable") {
        const Operator h(l, Matrix(Vector::LinSpaced(4, -1.0, 2.0).asDiagonal()));
        const auto z = z_partition(l);
        const auto rho = lueders_mix(random_state(l, 3, rng), z);
        for (double dt : {0.1, 1.0, 7.5}) CHECK(stability_defect(rho, z, h, dt) <= 1e-12);
    }
    SUBCASE("tracks the dephasing factor") {
        const auto m = build_dephasing(5, 23);
        const auto z = qubit_partition(m.layout, 0, 0.0);
        const auto rho = m.initial_state();
        for (int k = 0; k < 20; ++k) {
            const double t = 0.15 * k;
            const double d = stability_defect(rho, z, m.hamiltonian, t);
            CHECK(std::abs(d - std::abs(m.alpha * std::conj(m.beta)) * std::abs(dephasing_factor(m, t))) <= 1e-9);
            const auto rho_b = evolve(rho, m.hamiltonian, t);
            CHECK(d <= trace_distance(rho_b, lueders_mix(rho_b, z)) + 1e-12);
            CHECK(d <= trace_distance(rho_b, partial_hat(rho_b, z).hat) + 1e-12);
        }
    }
    SUBCASE("layout mismatch") {
        CHECK_THROWS_AS(stability_defect(random_state(l, 2, rng), z_partition(SpaceLayout({4})), Operator::zero(l), 1.0),
                        Error);
    }
}

TEST_CASE("ensemble_frequencies") {
    const SpaceLayout q({2});
    Vector plus(2);
    plus << 1.0, 1.0;
    HistorySchedule s;
    s.initial = DensityOperator::pure(q, plus / std::numbers::sqrt2);
    s.hamiltonian = Operator::zero(q);
    s.events = {event(0.0, z_partition(q), ReductionMode::lueders)};
    SUBCASE("fair coin within four sigma") {
        const auto rep = ensemble_frequencies(s, 100000, 1);
        CHECK(rep.flag_count() == 0);
        for (double f : rep.frequencies) CHECK(std::abs(f - 0.5) <= 0.0063);
        CHECK(rep.counts[0] + rep.counts[1] == 100000);
    }
    SUBCASE("certain outcome") {
        HistorySchedule c = s;
        c.initial = DensityOperator::from_matrix(q, Matrix(Vector::Unit(2, 0).asDiagonal()));
        const auto rep = ensemble_frequencies(c, 1000, 3);
        CHECK(rep.frequencies[0] == 1.0);
        CHECK(rep.frequencies[1] == 0.0);
        CHECK(rep.flag_count() == 0);
    }
    SUBCASE("deterministic across seeds and thread counts") {
        const auto a = ensemble_frequencies(s, 5000, 9, 1);
        const auto b = ensemble_frequencies(s, 5000, 9, 4);
        CHECK(a.counts == b.counts);
        CHECK(ensemble_frequencies(s, 5000, 9).counts == a.counts);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(ensemble_frequencies(s, 0, 1), Error);
        HistorySchedule e = s;
        e.events.clear();
        CHECK_THROWS_AS(ensemble_frequencies(e, 10, 1), Error);
    }
}

} // TEST_SUITE
