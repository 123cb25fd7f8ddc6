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

#include "reduxon/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "reduxon/metrics.hpp"
#include "reduxon/parallel.hpp"

namespace reduxon {

namespace {

Vector plus_state() {
    Vector v(2);
    v << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
    return v;
}

Vector kron(const Vector &a, const Vector &b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

Vector plus_register(std::size_t n) {
    Vector v = Vector::Ones(1);
    for (std::size_t k = 0; k < n; ++k) {
        v = kron(v, plus_state());
    }
    return v;
}

std::vector<double> seeded_couplings(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> uniform(0.5, 1.5);
    std::vector<double> g(n);
    for (auto &v : g) {
        v = uniform(rng);
    }
    return g;
}

void check_dense_limit(std::size_t dim) {
    if (dim > kMaxDenseDim) {
        throw Error("model dimension " + std::to_string(dim) + " exceeds the dense limit of " +
                    std::to_string(kMaxDenseDim));
    }
}

std::vector<std::size_t> qubit_dims(std::size_t head, std::size_t n) {
    std::vector<std::size_t> dims{head};
    dims.insert(dims.end(), n, 2);
    return dims;
}

} // namespace

// ---------------------------------------------------------------------------
// Dephasing model

DensityOperator DephasingModel::initial_state() const {
    Vector sys(2);
    sys << alpha, beta;
    return DensityOperator::pure(layout, kron(sys, plus_register(n_env)));
}

DephasingModel build_dephasing(std::vector<double> couplings) {
    const std::size_t n = couplings.size();
    if (n < 1) {
        throw Error("dephasing model needs at least one environment qubit");
    }
    if (n >= 10) {
        throw Error("dephasing model with " + std::to_string(n) +
                    " environment qubits exceeds the dense limit");
    }
    DephasingModel m;
    m.n_env = n;
    m.couplings = std::move(couplings);
    m.layout = SpaceLayout(qubit_dims(2, n));
    check_dense_limit(m.layout.total_dim());
    const Operator zz(SpaceLayout({2, 2}), Eigen::kroneckerProduct(pauli::Z(), pauli::Z()).eval());
    Operator h = Operator::zero(m.layout);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t sub[] = {0, k + 1};
        h = h + embed(zz, m.layout, sub) * Complex(m.couplings[k], 0.0);
    }
    m.hamiltonian = std::move(h);
    return m;
}

DephasingModel build_dephasing(std::size_t n_env, std::uint64_t seed) {
    if (n_env < 1) {
        throw Error("dephasing model needs at least one environment qubit");
    }
    if (n_env >= 10) {
        throw Error("dephasing model with " + std::to_string(n_env) +
                    " environment qubits exceeds the dense limit");
    }
    return build_dephasing(seeded_couplings(n_env, seed));
}

Complex dephasing_factor(const DephasingModel &model, double t) {
    double r = 1.0;
    for (auto g : model.couplings) {
        r *= std::cos(2.0 * g * t);
    }
    return {r, 0.0};
}

double simulated_coherence(const DephasingModel &model, double t) {
    const auto rho = evolve(model.initial_state(), model.hamiltonian, t);
    std::vector<std::size_t> env(model.n_env);
    for (std::size_t k = 0; k < model.n_env; ++k) {
        env[k] = k + 1;
    }
    const auto sys = partial_trace(rho, env);
    return std::abs(sys.matrix()(0, 1)) / std::abs(model.alpha * std::conj(model.beta));
}

std::optional<double> decoherence_time(const DephasingModel &model, double t_max, double dt,
                                       double threshold) {
    for (double t = 0.0; t <= t_max; t += dt) {
        if (std::abs(dephasing_factor(model, t)) < threshold) {
            return t;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Pointer model

DensityOperator PointerModel::initial_state() const {
    Vector ptr = Vector::Zero(3);
    ptr(1) = 1.0;
    return DensityOperator::pure(layout, kron(kron(plus_state(), ptr), plus_register(n_env)));
}

PointerModel build_pointer_model(std::size_t n_env, double lambda, std::uint64_t seed) {
    PointerModel m;
    m.n_env = n_env;
    m.lambda = lambda;
    m.couplings = seeded_couplings(n_env, seed);
    auto dims = qubit_dims(2, 0);
    dims.push_back(3);
    dims.insert(dims.end(), n_env, 2);
    m.layout = SpaceLayout(dims);
    check_dense_limit(m.layout.total_dim());

    Matrix shift = Matrix::Zero(3, 3);
    shift(1, 0) = 1.0;
    shift(2, 1) = 1.0;
    const Matrix p = Complex(0.0, -1.0) * (shift - shift.adjoint());
    Matrix q = Matrix::Zero(3, 3);
    q(0, 0) = -1.0;
    q(2, 2) = 1.0;

    const Operator coupling(SpaceLayout({2, 3}), Eigen::kroneckerProduct(pauli::Z(), p).eval());
    const std::size_t sys_ptr[] = {0, 1};
    Operator h = embed(coupling, m.layout, sys_ptr) * Complex(lambda, 0.0);
    const Operator qz(SpaceLayout({3, 2}), Eigen::kroneckerProduct(q, pauli::Z()).eval());
    for (std::size_t k = 0; k < n_env; ++k) {
        const std::size_t sub[] = {1, k + 2};
        h = h + embed(qz, m.layout, sub) * Complex(m.couplings[k], 0.0);
    }
    m.hamiltonian = std::move(h);
    return m;
}

ProjectorSet qubit_partition(const SpaceLayout &layout, std::size_t k, double theta) {
    if (k >= layout.subsystem_count() || layout.dim(k) != 2) {
        throw Error("qubit_partition: subsystem " + std::to_string(k) + " is not a qubit");
    }
    Matrix u(2, 2);
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    u << c, -s, s, c;
    const std::size_t ranks[] = {1, 1};
    const SubsystemPartition part = subsystem_partition(k, u, ranks);
    const std::size_t active[] = {k};
    return compound(std::span<const SubsystemPartition>(&part, 1), layout, active);
}

// ---------------------------------------------------------------------------
// Histories

std::string to_string(ReductionMode mode) {
    switch (mode) {
    case ReductionMode::lueders:
        return "lueders";
    case ReductionMode::vndlp:
        return "vndlp";
    case ReductionMode::partial:
        return "partial";
    }
    return "?";
}

ReductionMode parse_reduction_mode(const std::string &name) {
    if (name == "lueders") {
        return ReductionMode::lueders;
    }
    if (name == "vndlp") {
        return ReductionMode::vndlp;
    }
    if (name == "partial") {
        return ReductionMode::partial;
    }
    throw Error("unknown reduction mode '" + name + "' (expected lueders, vndlp or partial)");
}

void check_schedule(const HistorySchedule &schedule) {
    const auto &layout = schedule.initial.layout();
    if (schedule.hamiltonian.layout() != layout) {
        throw Error("schedule Hamiltonian does not match the initial state's layout");
    }
    double prev = schedule.t0;
    for (std::size_t j = 0; j < schedule.events.size(); ++j) {
        const auto &e = schedule.events[j];
        if (j == 0 ? e.t < prev : e.t <= prev) {
            throw Error("reduction event " + std::to_string(j) + " at t=" + std::to_string(e.t) +
                        " breaks strictly increasing time order");
        }
        prev = e.t;
        if (e.pset.layout() != layout) {
            throw Error("projector set of event " + std::to_string(j) + " does not match the layout");
        }
        if (e.mode == ReductionMode::vndlp && !e.pset.is_total()) {
            throw Error("event " + std::to_string(j) + ": vndlp reduction needs a total projector set");
        }
        if (e.mode == ReductionMode::partial && e.pset.is_total()) {
            throw Error("event " + std::to_string(j) + ": partial reduction needs inactive subsystems");
        }
    }
    if (schedule.t_end && *schedule.t_end < prev) {
        throw Error("schedule end time precedes the last event");
    }
}

namespace {

DensityOperator apply_mixture(const DensityOperator &rho, const ReductionEvent &e) {
    if (e.mode == ReductionMode::lueders) {
        return lueders_mix(rho, e.pset);
    }
    return reduce(rho, e.pset).hat;
}

DensityOperator apply_branch(const DensityOperator &rho, const ReductionEvent &e, std::size_t i) {
    switch (e.mode) {
    case ReductionMode::lueders:
        return lueders_branch(rho, e.pset, i);
    case ReductionMode::vndlp:
        return vndlp_branch(e.pset, i);
    case ReductionMode::partial:
        return partial_hat(rho, e.pset).branch_state(i);
    }
    throw Error("unreachable reduction mode");
}

HistoryRecord run_checked(const HistorySchedule &schedule, const Propagator &prop, HistoryMode mode,
                          Rng *rng, bool keep_final_reduced) {
    HistoryRecord rec;
    DensityOperator state = schedule.initial;
    double now = schedule.t0;
    for (std::size_t j = 0; j < schedule.events.size(); ++j) {
        const auto &e = schedule.events[j];
        state = prop.evolve(state, e.t - now);
        now = e.t;
        const bool last = j + 1 == schedule.events.size();
        if (last && keep_final_reduced) {
            rec.final_reduced = reduce(state, e.pset);
            rec.event_weights.push_back(rec.final_reduced->weights);
        } else {
            rec.event_weights.push_back(weights(state, e.pset));
        }
        if (mode == HistoryMode::mixture) {
            state = apply_mixture(state, e);
        } else {
            const auto i = sample_outcome(rec.event_weights.back(), *rng);
            rec.sampled.push_back(i);
            state = apply_branch(state, e, i);
        }
    }
    const double end = schedule.t_end.value_or(now);
    rec.final_state = prop.evolve(state, end - now);
    return rec;
}

} // namespace

HistoryRecord run_history(const HistorySchedule &schedule, HistoryMode mode, std::uint64_t seed) {
    check_schedule(schedule);
    const Propagator prop(schedule.hamiltonian);
    Rng rng(seed);
    return run_checked(schedule, prop, mode, &rng, true);
}

double noninterference_defect(const HistorySchedule &schedule) {
    check_schedule(schedule);
    if (schedule.events.size() < 2) {
        throw Error("noninterference needs at least one intermediate event before the final one");
    }
    const Propagator prop(schedule.hamiltonian);
    const auto with = run_checked(schedule, prop, HistoryMode::mixture, nullptr, false);
    const auto &final_event = schedule.events.back();
    const auto bare = prop.evolve(schedule.initial, final_event.t - schedule.t0);
    const auto without = weights(bare, final_event.pset);
    const auto &w = with.event_weights.back();
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += std::abs(w[i] - without[i]);
    }
    return 0.5 * acc;
}

double stability_defect(const DensityOperator &rho_a, const ProjectorSet &pset_a,
                        const Operator &hamiltonian, double dt) {
    if (rho_a.layout() != pset_a.layout()) {
        throw Error("stability_defect: projector set layout mismatch");
    }
    const auto rho_b = evolve(rho_a, hamiltonian, dt);
    return local_distance(rho_b, lueders_mix(rho_b, pset_a), pset_a.active_set());
}

std::size_t FrequencyReport::flag_count() const {
    return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), true));
}

FrequencyReport ensemble_frequencies(const HistorySchedule &schedule, std::size_t runs,
                                     std::uint64_t seed, std::size_t threads) {
    check_schedule(schedule);
    if (runs < 1) {
        throw Error("ensemble needs at least one run");
    }
    if (schedule.events.empty()) {
        throw Error("ensemble needs at least one reduction event");
    }
    const Propagator prop(schedule.hamiltonian);
    const auto mixture = run_checked(schedule, prop, HistoryMode::mixture, nullptr, false);
    const auto &w = mixture.event_weights.back();

    std::vector<std::size_t> outcome(runs);
    parallel_for(runs, threads, [&](std::size_t r) {
        Rng rng(derive_seed(seed, r));
        outcome[r] = run_checked(schedule, prop, HistoryMode::sampling, &rng, false).sampled.back();
    });

    FrequencyReport rep;
    rep.runs = runs;
    rep.counts.assign(w.size(), 0);
    for (auto i : outcome) {
        ++rep.counts[i];
    }
    const double m = static_cast<double>(runs);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double f = static_cast<double>(rep.counts[i]) / m;
        const double radius = 4.0 * std::sqrt(w[i] * (1.0 - w[i]) / m);
        rep.frequencies.push_back(f);
        rep.weights.push_back(w[i]);
        rep.radii.push_back(radius);
        rep.flagged.push_back(std::abs(f - w[i]) > radius + 1e-12);
    }
    return rep;
}

} // namespace reduxon
