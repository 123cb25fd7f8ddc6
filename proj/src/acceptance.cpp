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

#include "reduxon/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "random_families.hpp"
#include "reduxon/cli.hpp"
#include "reduxon/dynamics.hpp"
#include "reduxon/entropy_sieve.hpp"
#include "reduxon/metrics.hpp"
#include "reduxon/reduction.hpp"

namespace reduxon {

namespace {

constexpr std::uint64_t kSuiteSeed = 20260417;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double trace_norm(const Matrix &m) {
    const auto es = eigh(0.5 * (m + m.adjoint()));
    return es.values.cwiseAbs().sum();
}

/// Layouts with total dimension <= 12.
const std::vector<std::vector<std::size_t>> &small_layouts() {
    static const std::vector<std::vector<std::size_t>> v{{2, 2}, {2, 3}, {3, 2}, {2, 2, 2}, {3, 3},
                                                         {2, 5}, {2, 2, 3}, {4, 3}, {2, 6}, {3, 4}};
    return v;
}

/// Nonempty proper subset of the subsystems.
std::vector<std::size_t> random_active(std::size_t n, Rng &rng) {
    std::vector<std::size_t> out;
    while (out.empty() || out.size() == n) {
        out.clear();
        for (std::size_t k = 0; k < n; ++k) {
            if (std::bernoulli_distribution(0.5)(rng)) {
                out.push_back(k);
            }
        }
    }
    return out;
}

ProjectorSet random_pset(const SpaceLayout &l, bool total, Rng &rng) {
    if (total) {
        return detail::random_total_pset(l, rng);
    }
    const auto active = random_active(l.subsystem_count(), rng);
    return detail::random_partial_pset(l, active, rng);
}

SpaceLayout qubits(std::size_t n) { return SpaceLayout(std::vector<std::size_t>(n, 2)); }

template <class Pred> double first_time(const DephasingModel &m, double t_min, Pred pred) {
    for (int k = 0; k < 200000; ++k) {
        const double t = t_min + 1e-3 * k;
        if (pred(std::abs(dephasing_factor(m, t)))) {
            return t;
        }
    }
    throw Error("no grid time satisfies the dephasing condition");
}

// ---------------------------------------------------------------------------

CriterionResult fidelity_bounds() {
    CriterionResult r{1, "fidelity-trace-distance-bounds", false, ""};
    const std::size_t dims[] = {2, 3, 4};
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < 1000; ++t) {
        Rng rng(derive_seed(kSuiteSeed + 1, t));
        const SpaceLayout l = qubits(dims[t % 3]);
        const auto rho = random_state(l, 1, rng);
        const auto p = detail::random_total_pset(l, rng);
        const auto reduced = vn_hat(rho, p);
        const auto mix = lueders_mix(rho, p);
        if (!bound_check(rho, mix, true).contained(1e-9)) {
            ++violations;
        }
        double sum_sq = 0.0;
        for (double w : reduced.weights.values()) {
            sum_sq += w * w;
        }
        worst = std::max(worst, std::abs(fidelity(rho, mix) - sum_sq));
        for (auto i : reduced.branch_indices()) {
            const auto branch = lueders_branch(rho, p, i);
            if (!bound_check(rho, branch, true).contained(1e-9)) {
                ++violations;
            }
            worst = std::max(worst, std::abs(fidelity(rho, branch) - reduced.weights[i]));
        }
    }
    r.passed = violations == 0 && worst <= 1e-10;
    r.detail = "1000 pure states, d in {4,8,16}: " + std::to_string(violations) +
               " bound violations, max fidelity identity error " + fmt(worst);
    return r;
}

CriterionResult dominant_outcome() {
    CriterionResult r{2, "dominant-outcome-limits", false, ""};
    constexpr double slack = 1e-12;
    std::size_t failures = 0;
    std::size_t checks = 0;
    std::ostringstream os;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        double mix_lo = 1.0, mix_hi = 0.0;
        for (std::size_t t = 0; t < 20; ++t) {
            Rng rng(derive_seed(kSuiteSeed + 2, t + static_cast<std::uint64_t>(1e6 * eps)));
            const SpaceLayout l = qubits(2 + t % 3);
            const auto p = detail::random_total_pset(l, rng);
            const auto n = static_cast<Eigen::Index>(l.total_dim());
            // psi = sqrt(1 - eps) v_0 + sum_j sqrt(eps_j) v_j, v_i in range(P_i)
            std::vector<double> share(p.size(), 0.0);
            std::uniform_real_distribution<double> u(0.1, 1.0);
            double total = 0.0;
            for (std::size_t i = 1; i < p.size(); ++i) {
                share[i] = u(rng);
                total += share[i];
            }
            Vector psi = Vector::Zero(n);
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double w = i == 0 ? 1.0 - eps : eps * share[i] / total;
                const Vector v = (p.projector(i).matrix() * haar_vector(l.total_dim(), rng)).normalized();
                psi += std::sqrt(w) * v;
            }
            const auto rho = DensityOperator::pure(l, psi.normalized());
            const double d_mix = trace_distance(rho, lueders_mix(rho, p));
            mix_lo = std::min(mix_lo, d_mix);
            mix_hi = std::max(mix_hi, d_mix);
            auto check = [&](double v, double lo, double hi) {
                ++checks;
                if (v < lo - slack || v > hi + slack) {
                    ++failures;
                }
            };
            check(d_mix, 2 * eps - 2 * eps * eps, std::sqrt(2 * eps - eps * eps));
            check(trace_distance(rho, lueders_branch(rho, p, 0)), eps, std::sqrt(eps));
            const auto w = weights(rho, p);
            for (std::size_t i = 1; i < p.size(); ++i) {
                if (w[i] > kZeroWeight) {
                    check(trace_distance(rho, lueders_branch(rho, p, i)), 1.0 - eps, 1.0);
                }
            }
        }
        os << " eps=" << eps << ": D(rho,mix) in [" << fmt(mix_lo) << ", " << fmt(mix_hi) << "];";
    }
    r.passed = failures == 0;
    r.detail = std::to_string(checks) + " containments, " + std::to_string(failures) + " failures;" + os.str();
    return r;
}

CriterionResult class_isomorphism() {
    CriterionResult r{3, "class-isomorphism", false, ""};
    std::size_t failures = 0;
    double hat_err = 0.0;
    double kolmogorov_err = 0.0;
    double min_shift = 1.0;
    for (std::size_t t = 0; t < 200; ++t) {
        Rng rng(derive_seed(kSuiteSeed + 3, t));
        const auto &dims = small_layouts()[t % small_layouts().size()];
        const SpaceLayout l(dims);
        const bool total = t % 2 == 0;
        const auto p = random_pset(l, total, rng);
        const auto rho = random_state(l, l.total_dim(), rng);

        const auto sigma = class_member(rho, p, derive_seed(kSuiteSeed + 30, t));
        const auto a = reduce(rho, p);
        const auto b = reduce(sigma, p);
        hat_err = std::max(hat_err, (a.hat.matrix() - b.hat.matrix()).cwiseAbs().maxCoeff());
        if (!class_equal(rho, sigma, p)) {
            ++failures;
        }

        // move weight onto the lightest branch, keeping conditional states
        const auto w = a.weights.values();
        const auto lightest = static_cast<std::size_t>(std::min_element(w.begin(), w.end()) - w.begin());
        const double lambda = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
        std::vector<double> w2(w.size());
        double shift = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            w2[i] = (1.0 - lambda) * w[i] + (i == lightest ? lambda : 0.0);
            shift += 0.5 * std::abs(w2[i] - w[i]);
        }
        min_shift = std::min(min_shift, shift);
        Matrix m = Matrix::Zero(rho.dim(), rho.dim());
        for (std::size_t i = 0; i < p.size(); ++i) {
            const Matrix &pi = p.projector(i).matrix();
            m += (w2[i] / w[i]) * (pi * rho.matrix() * pi);
        }
        const auto moved = DensityOperator::from_matrix(l, m);
        const auto c = reduce(moved, p);
        const double delta = class_distance(a, c);
        kolmogorov_err = std::max({kolmogorov_err, std::abs(delta - shift),
                                   std::abs(delta - trace_distance(a.hat, c.hat))});
        if (class_equal(rho, moved, p)) {
            ++failures;
        }
    }
    r.passed = failures == 0 && hat_err <= 1e-10 && kolmogorov_err <= 1e-9 && min_shift >= 1e-3;
    r.detail = "200 trials (100 total, 100 partial): " + std::to_string(failures) +
               " class_equal mismatches, max hat difference " + fmt(hat_err) +
               ", max |Delta - Kolmogorov| " + fmt(kolmogorov_err) + ", smallest weight shift " + fmt(min_shift);
    return r;
}

CriterionResult double_lueders_check() {
    CriterionResult r{4, "double-lueders-construction", false, ""};
    static const std::vector<std::vector<std::size_t>> a_dims{{2}, {3}, {4}, {2, 2}, {5}, {2, 3}, {7}, {2, 2, 2}, {8}};
    static const std::vector<std::vector<std::size_t>> b_dims{{2}, {3}, {4}, {2, 2}};
    double worst = 0.0;
    double seed_gap = 0.0;
    for (std::size_t t = 0; t < 100; ++t) {
        Rng rng(derive_seed(kSuiteSeed + 4, t));
        const auto &da = a_dims[t % a_dims.size()];
        const auto &db = b_dims[(t / a_dims.size()) % b_dims.size()];
        const bool a_first = t % 2 == 0;
        std::vector<std::size_t> dims;
        std::vector<std::size_t> active;
        const auto &first = a_first ? da : db;
        const auto &second = a_first ? db : da;
        dims.insert(dims.end(), first.begin(), first.end());
        dims.insert(dims.end(), second.begin(), second.end());
        for (std::size_t k = 0; k < da.size(); ++k) {
            active.push_back(a_first ? k : db.size() + k);
        }
        const SpaceLayout l(dims);
        const auto p = detail::random_partial_pset(l, active, rng);
        const auto rho = random_state(l, 1 + t % l.total_dim(), rng);
        const Matrix hat = partial_hat(rho, p).hat.matrix();
        const Matrix x = double_lueders(rho, p, 0).matrix();
        const Matrix y = double_lueders(rho, p, derive_seed(kSuiteSeed + 40, t)).matrix();
        worst = std::max({worst, (x - hat).cwiseAbs().maxCoeff(), (y - hat).cwiseAbs().maxCoeff()});
        seed_gap = std::max(seed_gap, (x - y).cwiseAbs().maxCoeff());
    }
    r.passed = worst <= 1e-9 && seed_gap <= 1e-9;
    r.detail = "100 trials, d_A <= 8, d_B <= 4: max |rho'' - hat| " + fmt(worst) +
               ", max difference between basis seeds " + fmt(seed_gap);
    return r;
}

CriterionResult entropy_laws() {
    CriterionResult r{5, "entropy-laws", false, ""};
    std::size_t failures = 0;
    double unitary_err = 0.0;
    double min_g = 0.0;
    double commuting_g = 0.0;
    std::size_t strict = 0;
    for (std::size_t t = 0; t < 500; ++t) {
        Rng rng(derive_seed(kSuiteSeed + 5, t));
        const SpaceLayout l(small_layouts()[t % small_layouts().size()]);
        const auto p = random_pset(l, t % 2 == 0, rng);
        std::uniform_int_distribution<std::size_t> rank(1, l.total_dim());
        const auto rho = random_state(l, rank(rng), rng);
        const auto hat = reduce(rho, p).hat;
        const double ds = entropy(hat) - entropy(rho);
        if (trace_norm(hat.matrix() - rho.matrix()) > 1e-6) {
            ++strict;
            if (!(ds > 0.0)) {
                ++failures;
            }
        } else if (ds < -1e-9) {
            ++failures;
        }

        Matrix g = Matrix::Zero(rho.dim(), rho.dim());
        std::normal_distribution<double> normal;
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            for (Eigen::Index j = 0; j < g.cols(); ++j) {
                g(i, j) = Complex(normal(rng), normal(rng));
            }
        }
        const Operator h(l, 0.5 * (g + g.adjoint()));
        const double dt = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
        unitary_err = std::max(unitary_err, std::abs(entropy(evolve(rho, h, dt)) - entropy(rho)));
        const Propagator prop(h);
        min_g = std::min(min_g, evaluate_sieve(rho, p, prop, dt).G);

        if (t % 5 == 0) {
            const auto es = eigh(h.matrix());
            const auto ranks = detail::random_ranks(l.total_dim(), rng);
            const auto commuting = basis_partition(l, Operator(l, es.vectors), ranks);
            commuting_g = std::max(commuting_g, std::abs(evaluate_sieve(rho, commuting, prop, dt).G));
        }
    }
    r.passed = failures == 0 && unitary_err <= 1e-10 && min_g >= -1e-9 && commuting_g <= 1e-9;
    r.detail = "500 pairs (" + std::to_string(strict) + " with strict increase required): " +
               std::to_string(failures) + " failures; unitary entropy drift " + fmt(unitary_err) + "; min G " +
               fmt(min_g) + "; max |G| for commuting sets " + fmt(commuting_g);
    return r;
}

CriterionResult decoherence_oracle() {
    CriterionResult r{6, "decoherence-oracle", false, ""};
    const auto m = build_dephasing(8, kSuiteSeed + 6);
    const auto z = qubit_partition(m.layout, 0, 0.0);
    const auto rho = m.initial_state();
    const double amp = std::abs(m.alpha * std::conj(m.beta));
    double coh_err = 0.0;
    double stab_err = 0.0;
    for (int k = 0; k < 50; ++k) {
        const double t = 3.0 * k / 49.0;
        const double r_t = std::abs(dephasing_factor(m, t));
        coh_err = std::max(coh_err, std::abs(simulated_coherence(m, t) - r_t));
        stab_err = std::max(stab_err, std::abs(stability_defect(rho, z, m.hamiltonian, t) / amp - r_t));
    }
    r.passed = coh_err <= 1e-10 && stab_err <= 1e-9;
    r.detail = "n_env = 8, 50 times in [0, 3]: max coherence error " + fmt(coh_err) +
               ", max stability-defect error " + fmt(stab_err);
    return r;
}

CriterionResult noninterference_contrast() {
    CriterionResult r{7, "noninterference-contrast", false, ""};
    const auto m = build_dephasing(8, kSuiteSeed + 7);
    const auto z = qubit_partition(m.layout, 0, 0.0);
    const auto x = qubit_partition(m.layout, 0, std::numbers::pi / 2);
    auto ev = [](double t, const ProjectorSet &p) {
        ReductionEvent e;
        e.t = t;
        e.pset = p;
        e.mode = ReductionMode::partial;
        return e;
    };
    HistorySchedule s;
    s.initial = m.initial_state();
    s.hamiltonian = m.hamiltonian;

    const double tau = first_time(m, 0.0, [](double v) { return v < 0.05; });
    const double t_final = first_time(m, 3.0 * tau, [](double v) { return v < 0.02; });
    s.events = {ev(tau, z), ev(2.0 * tau, z), ev(t_final, x)};
    const double late = noninterference_defect(s);

    const double step = 0.01;
    const double r_early = std::abs(dephasing_factor(m, 3.0 * step));
    s.events = {ev(step, z), ev(2.0 * step, z), ev(3.0 * step, x)};
    const double early = noninterference_defect(s);

    r.passed = late < 0.01 && early > 0.1 && r_early > 0.9;
    r.detail = "tau_dec = " + fmt(tau) + ": spaced after decay defect " + fmt(late) + " (< 0.01); spacing " +
               fmt(step) + " with |r| = " + fmt(r_early) + " defect " + fmt(early) + " (> 0.1)";
    return r;
}

CriterionResult sieve_pointer_basis() {
    CriterionResult r{8, "sieve-pointer-basis", false, ""};
    const auto m = build_dephasing(4, kSuiteSeed + 8);
    RotationGrid grid;
    grid.reference = qubit_partition(m.layout, 0, 0.0);
    for (int k = 0; k < 10; ++k) {
        grid.points.push_back({0.0, (std::numbers::pi / 2) * k / 9.0, 0.0, 0.0});
    }
    SieveConfig cfg;
    cfg.hamiltonian = m.hamiltonian;
    cfg.dt = 1.0;
    cfg.candidates = grid;
    const auto res = sieve_search(m.initial_state(), cfg);
    const double gz = res.landscape.front().G;
    const double gx = res.landscape.back().G;
    r.passed = res.best_index == 0 && gx - gz > 0.0;
    r.detail = "10-point theta grid: minimizer index " + std::to_string(res.best_index) + ", G(z) = " + fmt(gz) +
               ", G(x) = " + fmt(gx) + ", margin " + fmt(gx - gz);
    return r;
}

HistorySchedule coin_schedule() {
    const SpaceLayout q({2});
    Vector plus(2);
    plus << 1.0, 1.0;
    HistorySchedule s;
    s.initial = DensityOperator::pure(q, plus / std::numbers::sqrt2);
    s.hamiltonian = Operator::zero(q);
    ReductionEvent e;
    e.t = 0.0;
    const std::size_t ones[] = {1, 1};
    e.pset = basis_partition(q, Operator::identity(q), ones);
    s.events = {e};
    return s;
}

CriterionResult born_frequencies() {
    CriterionResult r{9, "born-frequencies", false, ""};
    const auto s = coin_schedule();
    bool ok = true;
    std::ostringstream os;
    for (std::uint64_t seed : {101ULL, 202ULL, 303ULL}) {
        const auto rep = ensemble_frequencies(s, 100000, seed, 1);
        double dev = 0.0;
        for (std::size_t i = 0; i < rep.frequencies.size(); ++i) {
            dev = std::max(dev, std::abs(rep.frequencies[i] - rep.weights[i]));
        }
        ok = ok && dev <= 0.0063 && rep.flag_count() == 0;
        os << " seed " << seed << ": max |f - w| " << fmt(dev) << ", flags " << rep.flag_count() << ";";
    }
    r.passed = ok;
    r.detail = "M = 1e5, w = (0.5, 0.5):" + os.str();
    return r;
}

std::string read_file(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

CriterionResult determinism(const std::string &scratch) {
    CriterionResult r{10, "thread-count-determinism", false, ""};
    namespace fs = std::filesystem;
    fs::path dir = scratch.empty() ? fs::temp_directory_path() /
                                         ("reduxon-accept-" + std::to_string(std::chrono::steady_clock::now()
                                                                                 .time_since_epoch()
                                                                                 .count()))
                                   : fs::path(scratch);
    fs::create_directories(dir);

    const char *saved = std::getenv("REDUXON_THREADS");
    const std::string saved_value = saved ? saved : "";

    nlohmann::json ensemble_cfg = nlohmann::json::parse(R"({
      "model": {"kind": "dephasing", "couplings": [0.7, 1.3]},
      "psets": {"z": {"qubit": 0, "theta": 0.0}, "x": {"qubit": 0, "theta": 1.5707963267948966}},
      "events": [{"t": 0.4, "pset_ref": "z", "mode": "partial"},
                 {"t": 0.9, "pset_ref": "x", "mode": "partial"}],
      "runs": 20000
    })");

    bool ok = true;
    std::ostringstream os;
    for (const std::string kind : {"bounds-suite", "ensemble"}) {
        std::string reference;
        for (const char *threads : {"1", "4", "8"}) {
            ::setenv("REDUXON_THREADS", threads, 1);
            cli::Request req;
            req.kind = kind;
            req.seed = 7;
            if (kind == "bounds-suite") {
                req.trials = 1000;
                req.dim = 16;
            } else {
                req.config = ensemble_cfg;
            }
            const fs::path out = dir / (kind + "-t" + threads + ".json");
            req.out = out.string();
            std::ostringstream sink;
            const int status = cli::run(req, sink, sink);
            const std::string bytes = read_file(out);
            if (status != cli::kExitOk || bytes.empty()) {
                ok = false;
                os << " " << kind << " failed with status " << status << ";";
                continue;
            }
            if (reference.empty()) {
                reference = bytes;
            } else if (bytes != reference) {
                ok = false;
                os << " " << kind << " differs at REDUXON_THREADS=" << threads << ";";
            }
        }
        os << " " << kind << " " << reference.size() << " bytes x3;";
    }
    if (saved) {
        ::setenv("REDUXON_THREADS", saved_value.c_str(), 1);
    } else {
        ::unsetenv("REDUXON_THREADS");
    }
    if (scratch.empty()) {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    r.passed = ok;
    r.detail = "REDUXON_THREADS in {1,4,8}:" + os.str();
    return r;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions &options) {
    using Fn = std::function<CriterionResult()>;
    const std::vector<std::pair<int, Fn>> criteria{
        {1, fidelity_bounds},
        {2, dominant_outcome},
        {3, class_isomorphism},
        {4, double_lueders_check},
        {5, entropy_laws},
        {6, decoherence_oracle},
        {7, noninterference_contrast},
        {8, sieve_pointer_basis},
        {9, born_frequencies},
        {10, [&] { return determinism(options.scratch_dir); }},
    };
    static const char *names[] = {"",
                                  "fidelity-trace-distance-bounds",
                                  "dominant-outcome-limits",
                                  "class-isomorphism",
                                  "double-lueders-construction",
                                  "entropy-laws",
                                  "decoherence-oracle",
                                  "noninterference-contrast",
                                  "sieve-pointer-basis",
                                  "born-frequencies",
                                  "thread-count-determinism"};
    std::vector<CriterionResult> out;
    for (const auto &[id, fn] : criteria) {
        CriterionResult res;
        try {
            res = fn();
        } catch (const std::exception &e) {
            res = {id, names[id], false, std::string("exception: ") + e.what()};
        }
        if (options.on_result) {
            options.on_result(res);
        }
        out.push_back(std::move(res));
    }
    return out;
}

std::string format_result(const CriterionResult &r) {
    char head[64];
    std::snprintf(head, sizeof head, "%s %2d ", r.passed ? "PASS" : "FAIL", r.id);
    return head + r.name + ": " + r.detail;
}

} // namespace reduxon
