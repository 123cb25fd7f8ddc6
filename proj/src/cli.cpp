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

#include "reduxon/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <unistd.h>

#include "random_families.hpp"
#include "reduxon/acceptance.hpp"
#include "reduxon/dynamics.hpp"
#include "reduxon/entropy_sieve.hpp"
#include "reduxon/metrics.hpp"
#include "reduxon/parallel.hpp"
#include "reduxon/reduction.hpp"
#include "reduxon/serialize.hpp"

#ifndef REDUXON_VERSION
#define REDUXON_VERSION "0.0.0"
#endif

namespace reduxon::cli {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxEnv = 9;

// ---------------------------------------------------------------------------
// Models and states

struct Model {
    std::string kind;
    SpaceLayout layout;
    Operator hamiltonian;
    std::optional<DensityOperator> initial;
    std::optional<DephasingModel> dephasing;
};

std::size_t read_env_count(Fields &f) {
    const auto n = f.uint("n_env");
    if (n > kMaxEnv) {
        throw ConfigError(f.child("n_env") + ": at most " + std::to_string(kMaxEnv) + " environment qubits");
    }
    return static_cast<std::size_t>(n);
}

DensityOperator read_state(const json &v, const std::string &path, const std::optional<SpaceLayout> &layout,
                           const std::optional<DensityOperator> &fallback);

Model read_model(const json &v, const std::string &path) {
    Fields f(v, path);
    Model m;
    m.kind = f.string("kind");
    if (m.kind == "dephasing") {
        DephasingModel d;
        if (f.has("couplings")) {
            auto g = read_numbers(f.required("couplings"), f.child("couplings"));
            if (g.empty() || g.size() > kMaxEnv) {
                throw ConfigError(f.child("couplings") + ": expected 1 to " + std::to_string(kMaxEnv) + " couplings");
            }
            d = build_dephasing(std::move(g));
        } else {
            const auto n = read_env_count(f);
            d = build_dephasing(n, f.uint("seed"));
        }
        m.layout = d.layout;
        m.hamiltonian = d.hamiltonian;
        m.initial = d.initial_state();
        m.dephasing = std::move(d);
    } else if (m.kind == "pointer") {
        const auto n = read_env_count(f);
        const double lambda = f.number_or("lambda", 1.0);
        const auto p = build_pointer_model(n, lambda, f.uint("seed"));
        m.layout = p.layout;
        m.hamiltonian = p.hamiltonian;
        m.initial = p.initial_state();
    } else if (m.kind == "custom") {
        m.hamiltonian = read_operator(f.required("hamiltonian"), f.child("hamiltonian"));
        if (!m.hamiltonian.is_hermitian()) {
            throw ConfigError(f.child("hamiltonian") + ": not Hermitian");
        }
        m.layout = m.hamiltonian.layout();
        if (const auto *init = f.optional("initial")) {
            m.initial = read_state(*init, f.child("initial"), m.layout, std::nullopt);
        }
    } else {
        throw ConfigError(f.child("kind") + ": unknown model '" + m.kind + "' (expected dephasing, pointer or custom)");
    }
    f.finish();
    return m;
}

SpaceLayout read_layout(const json &v, const std::string &path) {
    try {
        return SpaceLayout(read_indices(v, path));
    } catch (const Error &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void require_layout(const SpaceLayout &have, const SpaceLayout &want, const std::string &path) {
    if (!(have == want)) {
        throw ConfigError(path + ": dims do not match the layout in use");
    }
}

DensityOperator read_state(const json &v, const std::string &path, const std::optional<SpaceLayout> &layout,
                           const std::optional<DensityOperator> &fallback) {
    if (v.is_string()) {
        const auto name = v.get<std::string>();
        if (name == "default") {
            if (!fallback) {
                throw ConfigError(path + ": no default state in this context");
            }
            return *fallback;
        }
        if (name == "maximally_mixed") {
            if (!layout) {
                throw ConfigError(path + ": layout unknown; give the state explicitly");
            }
            return DensityOperator::maximally_mixed(*layout);
        }
        throw ConfigError(path + ": unknown state name '" + name + "'");
    }
    if (!v.is_object()) {
        throw ConfigError(path + ": expected a state name or object");
    }
    if (v.contains("random")) {
        Fields outer(v, path);
        Fields f(outer.required("random"), outer.child("random"));
        outer.finish();
        SpaceLayout l;
        if (f.has("dims")) {
            l = read_layout(f.required("dims"), f.child("dims"));
        } else if (layout) {
            l = *layout;
        } else {
            throw ConfigError(f.path() + ": dims required");
        }
        if (layout) {
            require_layout(l, *layout, f.child("dims"));
        }
        const auto rank = f.uint_or("rank", l.total_dim());
        if (rank < 1 || rank > l.total_dim()) {
            throw ConfigError(f.child("rank") + ": must lie in [1, " + std::to_string(l.total_dim()) + "]");
        }
        const auto seed = f.uint("seed");
        f.finish();
        return random_state(l, rank, seed);
    }
    if (v.contains("pure")) {
        Fields outer(v, path);
        Fields f(outer.required("pure"), outer.child("pure"));
        outer.finish();
        const SpaceLayout l = read_layout(f.required("dims"), f.child("dims"));
        if (layout) {
            require_layout(l, *layout, f.child("dims"));
        }
        const auto re = read_numbers(f.required("re"), f.child("re"));
        std::vector<double> im(re.size(), 0.0);
        if (const auto *imv = f.optional("im")) {
            im = read_numbers(*imv, f.child("im"));
        }
        f.finish();
        if (re.size() != l.total_dim() || im.size() != l.total_dim()) {
            throw ConfigError(f.path() + ": expected " + std::to_string(l.total_dim()) + " amplitudes");
        }
        Vector psi(static_cast<Eigen::Index>(re.size()));
        for (std::size_t i = 0; i < re.size(); ++i) {
            psi(static_cast<Eigen::Index>(i)) = Complex(re[i], im[i]);
        }
        if (psi.norm() < 1e-12) {
            throw ConfigError(f.path() + ": zero vector");
        }
        return DensityOperator::pure(l, psi.normalized());
    }
    const Operator op = read_operator(v, path);
    if (layout) {
        require_layout(op.layout(), *layout, path + ".dims");
    }
    return DensityOperator::from_operator(op);
}

// ---------------------------------------------------------------------------
// Projector sets

Matrix read_basis(const json &v, const std::string &path, const SpaceLayout &layout) {
    if (v.is_string()) {
        if (v.get<std::string>() != "identity") {
            throw ConfigError(path + ": expected \"identity\" or a matrix");
        }
        const auto n = static_cast<Eigen::Index>(layout.total_dim());
        return Matrix::Identity(n, n);
    }
    const Operator op = read_operator(v, path);
    require_layout(op.layout(), layout, path + ".dims");
    return op.matrix();
}

std::vector<std::size_t> read_ranks(Fields &f, std::size_t dim) {
    const auto ranks = read_indices(f.required("ranks"), f.child("ranks"));
    std::size_t total = 0;
    for (auto r : ranks) {
        if (r == 0) {
            throw ConfigError(f.child("ranks") + ": ranks must be positive");
        }
        total += r;
    }
    if (total != dim) {
        throw ConfigError(f.child("ranks") + ": ranks sum to " + std::to_string(total) + ", expected " +
                          std::to_string(dim));
    }
    return ranks;
}

ProjectorSet read_pset(const json &v, const std::string &path, const std::optional<SpaceLayout> &context,
                       bool check = true) {
    Fields f(v, path);
    f.optional("name");
    SpaceLayout layout;
    if (f.has("layout")) {
        layout = read_layout(f.required("layout"), f.child("layout"));
        if (context) {
            require_layout(layout, *context, f.child("layout"));
        }
    } else if (context) {
        layout = *context;
    } else {
        throw ConfigError(path + ": layout required");
    }

    std::vector<std::size_t> active;
    if (f.has("active")) {
        try {
            active = layout.normalize_subset(read_indices(f.required("active"), f.child("active")));
        } catch (const Error &e) {
            throw ConfigError(f.child("active") + ": " + e.what());
        }
    }
    if (active.empty()) {
        active = layout.all_indices();
    }
    const SpaceLayout la = layout.restrict_to(active);

    ProjectorSet p;
    if (f.has("qubit")) {
        const auto k = f.uint("qubit");
        const double theta = f.number_or("theta", 0.0);
        if (k >= layout.subsystem_count() || layout.dim(k) != 2) {
            throw ConfigError(f.child("qubit") + ": subsystem " + std::to_string(k) + " is not a qubit");
        }
        p = qubit_partition(layout, k, theta);
    } else if (f.has("projectors")) {
        const auto &arr = read_array(f.required("projectors"), f.child("projectors"));
        std::vector<Operator> ops;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto ip = f.child("projectors") + "[" + std::to_string(i) + "]";
            ops.push_back(read_operator(arr[i], ip));
            require_layout(ops.back().layout(), la, ip + ".dims");
        }
        p = ProjectorSet::partial(layout, active, std::move(ops));
    } else if (f.has("basis")) {
        const Matrix u = read_basis(f.required("basis"), f.child("basis"), la);
        const auto ranks = read_ranks(f, la.total_dim());
        const auto local = basis_partition(la, Operator(la, u), ranks);
        p = ProjectorSet::partial(layout, active, local.projectors());
    } else if (f.has("partitions")) {
        const auto &arr = read_array(f.required("partitions"), f.child("partitions"));
        std::vector<SubsystemPartition> parts;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Fields g(arr[i], f.child("partitions") + "[" + std::to_string(i) + "]");
            const auto k = g.uint("subsystem");
            if (k >= layout.subsystem_count()) {
                throw ConfigError(g.child("subsystem") + ": out of range");
            }
            const SpaceLayout lk({layout.dim(k)});
            const Matrix u = g.has("basis") ? read_basis(g.required("basis"), g.child("basis"), lk)
                                            : Matrix::Identity(static_cast<Eigen::Index>(lk.total_dim()),
                                                               static_cast<Eigen::Index>(lk.total_dim()));
            const auto ranks = read_ranks(g, lk.total_dim());
            g.finish();
            parts.push_back(subsystem_partition(k, u, ranks));
        }
        p = compound(parts, layout, active);
    } else {
        throw ConfigError(path + ": expected one of qubit, projectors, basis or partitions");
    }
    f.finish();
    if (check) {
        const auto report = validate(p);
        if (!report.passed()) {
            throw Error(path + ": projector set fails validation (max violation " +
                        format_double(std::max({report.hermiticity, report.idempotence, report.orthogonality,
                                                report.completeness})) +
                        ")");
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Schedules

struct Schedule {
    Model model;
    HistorySchedule schedule;
};

Schedule read_schedule(Fields &f) {
    Schedule s;
    s.model = read_model(f.required("model"), f.child("model"));
    const SpaceLayout &layout = s.model.layout;
    s.schedule.hamiltonian = s.model.hamiltonian;
    if (const auto *init = f.optional("initial")) {
        s.schedule.initial = read_state(*init, f.child("initial"), layout, s.model.initial);
    } else if (s.model.initial) {
        s.schedule.initial = *s.model.initial;
    } else {
        throw ConfigError(f.path() + ": initial state required for this model");
    }

    std::map<std::string, ProjectorSet> named;
    if (const auto *psets = f.optional("psets")) {
        if (!psets->is_object()) {
            throw ConfigError(f.child("psets") + ": expected an object");
        }
        for (const auto &[name, spec] : psets->items()) {
            named.emplace(name, read_pset(spec, f.child("psets") + "." + name, layout));
        }
    }
    const auto &events = read_array(f.required("events"), f.child("events"));
    for (std::size_t i = 0; i < events.size(); ++i) {
        Fields e(events[i], f.child("events") + "[" + std::to_string(i) + "]");
        ReductionEvent ev;
        ev.t = e.number("t");
        if (e.has("pset_ref")) {
            ev.pset_ref = e.string("pset_ref");
            const auto it = named.find(ev.pset_ref);
            if (it == named.end()) {
                throw ConfigError(e.child("pset_ref") + ": no projector set named '" + ev.pset_ref + "'");
            }
            ev.pset = it->second;
        } else if (e.has("pset")) {
            ev.pset = read_pset(e.required("pset"), e.child("pset"), layout);
        } else {
            throw ConfigError(e.path() + ": pset_ref or pset required");
        }
        const auto mode = e.string_or("mode", "lueders");
        try {
            ev.mode = parse_reduction_mode(mode);
        } catch (const Error &err) {
            throw ConfigError(e.child("mode") + ": " + err.what());
        }
        e.finish();
        s.schedule.events.push_back(std::move(ev));
    }
    s.schedule.t0 = f.number_or("t0", 0.0);
    if (f.has("t_end")) {
        s.schedule.t_end = f.number("t_end");
    }
    try {
        check_schedule(s.schedule);
    } catch (const Error &e) {
        throw ConfigError(f.path() + ": " + e.what());
    }
    return s;
}

// ---------------------------------------------------------------------------
// Output helpers

struct Context {
    const Request &request;
    std::optional<std::uint64_t> seed;
    std::string hash;

    [[nodiscard]] bool csv() const { return request.format == "csv"; }

    std::uint64_t require_seed() const {
        if (!seed) {
            throw ConfigError(request.kind + ": a seed is required (--seed or top-level \"seed\")");
        }
        return *seed;
    }

    [[nodiscard]] std::string envelope(Json result) const {
        Json doc;
        doc["reduxon_version"] = version();
        doc["kind"] = request.kind;
        doc["config_hash"] = hash;
        doc["seed"] = seed ? Json(*seed) : Json(nullptr);
        doc["result"] = std::move(result);
        return dump_json(doc);
    }

    [[nodiscard]] std::string csv_header() const {
        std::string h = "# reduxon " + version() + " kind=" + request.kind + " config_hash=" + hash;
        if (seed) {
            h += " seed=" + std::to_string(*seed);
        }
        return h + "\n";
    }
};

class Csv {
  public:
    explicit Csv(const Context &ctx) : text_(ctx.csv_header()) {}

    template <class... Ts> void row(const Ts &...cells) {
        bool first = true;
        ((append(cells, first)), ...);
        text_ += "\n";
    }

    [[nodiscard]] const std::string &str() const { return text_; }

  private:
    void sep(bool &first) {
        if (!first) {
            text_ += ",";
        }
        first = false;
    }
    void append(double v, bool &first) {
        sep(first);
        text_ += format_double(v);
    }
    void append(std::size_t v, bool &first) {
        sep(first);
        text_ += std::to_string(v);
    }
    void append(int v, bool &first) {
        sep(first);
        text_ += std::to_string(v);
    }
    void append(bool v, bool &first) {
        sep(first);
        text_ += v ? "true" : "false";
    }
    void append(const std::string &v, bool &first) {
        sep(first);
        if (v.find_first_of(",\"\n") == std::string::npos) {
            text_ += v;
            return;
        }
        text_ += '"';
        for (char c : v) {
            if (c == '"') {
                text_ += '"';
            }
            text_ += c;
        }
        text_ += '"';
    }
    void append(const char *v, bool &first) { append(std::string(v), first); }

    std::string text_;
};

std::string optional_text(const std::optional<double> &v) { return v ? format_double(*v) : ""; }

// ---------------------------------------------------------------------------
// Kinds

Outcome run_validate(const Context &ctx, Fields &f) {
    const double tol = f.number_or("tolerance", 1e-9);
    const auto p = read_pset(f.required("pset"), f.child("pset"), std::nullopt, false);
    f.finish();
    const auto report = validate(p, tol);
    Outcome o;
    o.status = report.passed() ? kExitOk : kExitFailure;
    if (!report.passed()) {
        o.messages.push_back("validate: projector set fails the criteria");
    }
    if (ctx.csv()) {
        Csv c(ctx);
        c.row("criterion", "violation");
        c.row("hermiticity", report.hermiticity);
        c.row("idempotence", report.idempotence);
        c.row("orthogonality", report.orthogonality);
        c.row("completeness", report.completeness);
        c.row("passed", report.passed());
        o.payload = c.str();
    } else {
        Json r;
        r["report"] = to_json(report);
        r["pset"] = to_json(p);
        o.payload = ctx.envelope(std::move(r));
    }
    return o;
}

Outcome run_reduce(const Context &ctx, Fields &f) {
    const auto rho = read_state(f.required("state"), f.child("state"), std::nullopt, std::nullopt);
    const auto p = read_pset(f.required("pset"), f.child("pset"), rho.layout());
    std::optional<std::uint64_t> dl_seed;
    if (const auto *dl = f.optional("double_lueders")) {
        Fields g(*dl, f.child("double_lueders"));
        dl_seed = g.uint_or("basis_seed", 0);
        g.finish();
    }
    f.finish();

    const auto reduced = reduce(rho, p);
    const double s_before = entropy(rho);
    const double s_after = entropy(reduced.hat);
    Outcome o;
    if (ctx.csv()) {
        Csv c(ctx);
        c.row("branch", "weight");
        for (std::size_t i = 0; i < reduced.weights.size(); ++i) {
            c.row(i, reduced.weights[i]);
        }
        o.payload = c.str();
        return o;
    }
    Json r;
    r["reduced"] = to_json(reduced);
    r["entropy_before"] = s_before;
    r["entropy_after"] = s_after;
    if (dl_seed) {
        const auto dl = double_lueders(rho, p, *dl_seed);
        Json d;
        d["basis_seed"] = *dl_seed;
        d["state"] = to_json(dl);
        d["max_error"] = (dl.matrix() - reduced.hat.matrix()).cwiseAbs().maxCoeff();
        r["double_lueders"] = std::move(d);
    }
    o.payload = ctx.envelope(std::move(r));
    return o;
}

Outcome run_distance(const Context &ctx, Fields &f) {
    const auto rho = read_state(f.required("rho"), f.child("rho"), std::nullopt, std::nullopt);
    const auto sigma = read_state(f.required("sigma"), f.child("sigma"), rho.layout(), std::nullopt);
    const auto metric = f.string_or("metric", "trace_distance");
    DistanceReport rep;
    rep.metric_name = metric;
    std::optional<bool> same_class;
    if (metric == "trace_distance") {
        const bool pure = f.boolean_or("pure", rho.purity() > 1.0 - 1e-9);
        rep = bound_check(rho, sigma, pure);
    } else if (metric == "fidelity") {
        rep.value = fidelity(rho, sigma);
    } else if (metric == "pseudometric") {
        if (f.has("pset")) {
            rep.value = pseudometric(rho, sigma, read_pset(f.required("pset"), f.child("pset"), rho.layout()));
        } else {
            const auto &arr = read_array(f.required("qset"), f.child("qset"));
            std::vector<Operator> q;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const auto ip = f.child("qset") + "[" + std::to_string(i) + "]";
                q.push_back(read_operator(arr[i], ip));
                require_layout(q.back().layout(), rho.layout(), ip + ".dims");
            }
            rep.value = pseudometric(rho, sigma, q);
        }
    } else if (metric == "class_distance") {
        const auto p = read_pset(f.required("pset"), f.child("pset"), rho.layout());
        rep.value = class_distance(reduce(rho, p), reduce(sigma, p));
        same_class = class_equal(rho, sigma, p);
    } else if (metric == "local_distance") {
        const auto subs = read_indices(f.required("subsystems"), f.child("subsystems"));
        try {
            (void)rho.layout().normalize_subset(subs);
        } catch (const Error &e) {
            throw ConfigError(f.child("subsystems") + ": " + e.what());
        }
        rep.value = local_distance(rho, sigma, subs);
    } else {
        throw ConfigError(f.child("metric") + ": unknown metric '" + metric +
                          "' (expected trace_distance, fidelity, pseudometric, class_distance or local_distance)");
    }
    f.finish();
    Outcome o;
    if (ctx.csv()) {
        Csv c(ctx);
        c.row("metric", "value", "lower_bound", "upper_bound");
        c.row(rep.metric_name, rep.value, optional_text(rep.lower_bound), optional_text(rep.upper_bound));
        o.payload = c.str();
        return o;
    }
    Json r = to_json(rep);
    if (same_class) {
        r["class_equal"] = *same_class;
    }
    o.payload = ctx.envelope(std::move(r));
    return o;
}

CandidateFamily read_candidates(const json &v, const std::string &path, const SpaceLayout &layout) {
    Fields f(v, path);
    CandidateFamily fam;
    if (f.has("explicit")) {
        const auto &arr = read_array(f.required("explicit"), f.child("explicit"));
        ExplicitCandidates c;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto ip = f.child("explicit") + "[" + std::to_string(i) + "]";
            c.psets.push_back(read_pset(arr[i], ip, layout));
            c.names.push_back(arr[i].is_object() && arr[i].contains("name")
                                  ? read_string(arr[i]["name"], ip + ".name")
                                  : std::to_string(i));
        }
        if (c.psets.empty()) {
            throw ConfigError(f.child("explicit") + ": at least one candidate required");
        }
        fam = std::move(c);
    } else if (f.has("grid")) {
        Fields g(f.required("grid"), f.child("grid"));
        RotationGrid grid;
        grid.reference = read_pset(g.required("reference"), g.child("reference"), layout);
        const auto n = rotation_parameter_count(grid.reference);
        const auto &arr = read_array(g.required("points"), g.child("points"));
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto ip = g.child("points") + "[" + std::to_string(i) + "]";
            grid.points.push_back(read_numbers(arr[i], ip));
            if (grid.points.back().size() != n) {
                throw ConfigError(ip + ": expected " + std::to_string(n) + " parameters");
            }
        }
        if (grid.points.empty()) {
            throw ConfigError(g.child("points") + ": at least one point required");
        }
        g.finish();
        fam = std::move(grid);
    } else if (f.has("theta_grid")) {
        Fields g(f.required("theta_grid"), f.child("theta_grid"));
        const auto k = g.uint("qubit");
        if (k >= layout.subsystem_count() || layout.dim(k) != 2) {
            throw ConfigError(g.child("qubit") + ": subsystem " + std::to_string(k) + " is not a qubit");
        }
        const double from = g.number_or("from", 0.0);
        const double to = g.number_or("to", std::numbers::pi / 2);
        const auto steps = g.uint_or("steps", 10);
        if (steps < 1) {
            throw ConfigError(g.child("steps") + ": must be positive");
        }
        g.finish();
        RotationGrid grid;
        grid.reference = qubit_partition(layout, k, 0.0);
        for (std::uint64_t i = 0; i < steps; ++i) {
            const double theta = steps == 1 ? from : from + (to - from) * static_cast<double>(i) / (steps - 1);
            grid.points.push_back({0.0, theta, 0.0, 0.0});
        }
        fam = std::move(grid);
    } else if (f.has("search")) {
        Fields g(f.required("search"), f.child("search"));
        RotationSearch s;
        s.reference = read_pset(g.required("reference"), g.child("reference"), layout);
        if (const auto *start = g.optional("start")) {
            s.start = read_numbers(*start, g.child("start"));
            if (s.start.size() != rotation_parameter_count(s.reference)) {
                throw ConfigError(g.child("start") + ": expected " +
                                  std::to_string(rotation_parameter_count(s.reference)) + " parameters");
            }
        }
        s.initial_step = g.number_or("initial_step", s.initial_step);
        s.max_evaluations = g.uint_or("max_evaluations", s.max_evaluations);
        s.tolerance = g.number_or("tolerance", s.tolerance);
        g.finish();
        fam = std::move(s);
    } else {
        throw ConfigError(path + ": expected one of explicit, grid, theta_grid or search");
    }
    f.finish();
    return fam;
}

Outcome run_sieve(const Context &ctx, Fields &f) {
    const auto model = read_model(f.required("model"), f.child("model"));
    DensityOperator rho;
    if (const auto *st = f.optional("state")) {
        rho = read_state(*st, f.child("state"), model.layout, model.initial);
    } else if (model.initial) {
        rho = *model.initial;
    } else {
        throw ConfigError(f.path() + ": state required for this model");
    }
    SieveConfig cfg;
    cfg.hamiltonian = model.hamiltonian;
    cfg.dt = f.number("dt");
    cfg.candidates = read_candidates(f.required("candidates"), f.child("candidates"), model.layout);
    cfg.threads = default_thread_count();
    f.finish();
    const auto res = sieve_search(rho, cfg);
    Outcome o;
    if (ctx.csv()) {
        Csv c(ctx);
        c.row("index", "id", "G", "params");
        for (std::size_t i = 0; i < res.landscape.size(); ++i) {
            std::string params;
            for (double x : res.landscape[i].params) {
                params += (params.empty() ? "" : " ") + format_double(x);
            }
            c.row(i, res.landscape[i].id, res.landscape[i].G, params);
        }
        o.payload = c.str();
        return o;
    }
    o.payload = ctx.envelope(to_json(res));
    return o;
}

Outcome run_history(const Context &ctx, Fields &f) {
    const auto mode_name = f.string_or("mode", "mixture");
    HistoryMode mode;
    if (mode_name == "mixture") {
        mode = HistoryMode::mixture;
    } else if (mode_name == "sampling") {
        mode = HistoryMode::sampling;
    } else {
        throw ConfigError(f.child("mode") + ": expected mixture or sampling");
    }
    auto s = read_schedule(f);
    std::optional<std::pair<double, std::uint64_t>> series;
    if (const auto *ser = f.optional("series")) {
        Fields g(*ser, f.child("series"));
        const double t_max = g.number("t_max");
        const auto points = g.uint_or("points", 50);
        g.finish();
        if (!s.model.dephasing) {
            throw ConfigError(f.child("series") + ": only available for the dephasing model");
        }
        if (points < 2 || !(t_max > 0.0)) {
            throw ConfigError(f.child("series") + ": need t_max > 0 and at least 2 points");
        }
        series = {t_max, points};
    }
    f.finish();
    const std::uint64_t seed = mode == HistoryMode::sampling ? ctx.require_seed() : ctx.seed.value_or(0);

    const auto record = run_history(s.schedule, mode, seed);
    std::optional<double> defect;
    if (s.schedule.events.size() >= 2) {
        defect = noninterference_defect(s.schedule);
    }

    struct Row {
        double t, r, stability;
    };
    std::vector<Row> rows;
    if (series) {
        const auto &dm = *s.model.dephasing;
        const ProjectorSet &probe =
            s.schedule.events.empty() ? qubit_partition(dm.layout, 0, 0.0) : s.schedule.events.front().pset;
        for (std::uint64_t k = 0; k < series->second; ++k) {
            const double t = series->first * static_cast<double>(k) / static_cast<double>(series->second - 1);
            rows.push_back({t, std::abs(dephasing_factor(dm, t)),
                            stability_defect(s.schedule.initial, probe, dm.hamiltonian, t)});
        }
    }

    Outcome o;
    if (ctx.csv()) {
        Csv c(ctx);
        if (series) {
            c.row("t", "abs_r", "stability_defect");
            for (const auto &r : rows) {
                c.row(r.t, r.r, r.stability);
            }
        } else {
            c.row("event", "t", "branch", "weight");
            for (std::size_t e = 0; e < record.event_weights.size(); ++e) {
                for (std::size_t i = 0; i < record.event_weights[e].size(); ++i) {
                    c.row(e, s.schedule.events[e].t, i, record.event_weights[e][i]);
                }
            }
        }
        o.payload = c.str();
        return o;
    }
    Json r;
    r["mode"] = mode_name;
    r["record"] = to_json(record);
    r["noninterference_defect"] = defect ? Json(*defect) : Json(nullptr);
    if (series) {
        Json arr = Json::array();
        for (const auto &row : rows) {
            Json x;
            x["t"] = row.t;
            x["abs_r"] = row.r;
            x["stability_defect"] = row.stability;
            arr.push_back(std::move(x));
        }
        r["series"] = std::move(arr);
    }
    o.payload = ctx.envelope(std::move(r));
    return o;
}

Outcome run_ensemble(const Context &ctx, Fields &f) {
    auto s = read_schedule(f);
    std::uint64_t runs = f.uint_or("runs", 10000);
    f.finish();
    if (ctx.request.trials) {
        runs = *ctx.request.trials;
    }
    if (runs < 1) {
        throw ConfigError("ensemble: runs must be positive");
    }
    const auto seed = ctx.require_seed();
    const auto rep = ensemble_frequencies(s.schedule, runs, seed, default_thread_count());
    Outcome o;
    if (rep.flag_count() > 0) {
        o.messages.push_back("ensemble: " + std::to_string(rep.flag_count()) +
                             " branch frequencies outside the 4-sigma radius");
    }
    if (ctx.csv()) {
        Csv c(ctx);
        c.row("branch", "count", "frequency", "weight", "radius", "flagged");
        for (std::size_t i = 0; i < rep.counts.size(); ++i) {
            c.row(i, rep.counts[i], rep.frequencies[i], rep.weights[i], rep.radii[i], bool(rep.flagged[i]));
        }
        o.payload = c.str();
        return o;
    }
    o.payload = ctx.envelope(to_json(rep));
    return o;
}

struct BoundsTrial {
    std::size_t dim = 0;
    std::size_t blocks = 0;
    double distance = 0.0;
    double fidelity = 0.0;
    bool contained = true;
    double identity_error = 0.0;
    bool mixed_contained = true;
};

Outcome run_bounds_suite(const Context &ctx, const json *config) {
    std::size_t trials = 1000;
    std::size_t max_dim = 16;
    if (config) {
        Fields f(*config, "config");
        f.optional("kind");
        f.optional("seed");
        trials = f.uint_or("trials", trials);
        max_dim = f.uint_or("dim", max_dim);
        f.finish();
    }
    trials = ctx.request.trials.value_or(trials);
    max_dim = ctx.request.dim.value_or(max_dim);
    if (trials < 1) {
        throw ConfigError("bounds-suite: trials must be positive");
    }
    if (max_dim < 2 || max_dim > 64) {
        throw ConfigError("bounds-suite: dim must lie in [2, 64]");
    }
    const auto seed = ctx.require_seed();

    std::vector<BoundsTrial> out(trials);
    parallel_for(trials, default_thread_count(), [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        BoundsTrial &r = out[t];
        r.dim = std::uniform_int_distribution<std::size_t>(2, max_dim)(rng);
        const SpaceLayout l({r.dim});
        const auto rho = random_state(l, 1, rng);
        const auto p = detail::random_total_pset(l, rng);
        r.blocks = p.size();
        const auto w = weights(rho, p);
        const auto mix = lueders_mix(rho, p);
        const auto rep = bound_check(rho, mix, true);
        r.distance = rep.value;
        r.fidelity = fidelity(rho, mix);
        r.contained = rep.contained(1e-9);
        double sum_sq = 0.0;
        for (double x : w.values()) {
            sum_sq += x * x;
        }
        r.identity_error = std::abs(r.fidelity - sum_sq);
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (w[i] <= kZeroWeight) {
                continue;
            }
            const auto branch = lueders_branch(rho, p, i);
            r.contained = r.contained && bound_check(rho, branch, true).contained(1e-9);
            r.identity_error = std::max(r.identity_error, std::abs(fidelity(rho, branch) - w[i]));
        }
        std::uniform_int_distribution<std::size_t> rank(1, r.dim);
        const auto a = random_state(l, rank(rng), rng);
        const auto b = random_state(l, rank(rng), rng);
        r.mixed_contained = bound_check(a, b, false).contained(1e-9);
    });

    std::size_t violations = 0;
    double worst_identity = 0.0;
    for (const auto &r : out) {
        violations += (r.contained ? 0 : 1) + (r.mixed_contained ? 0 : 1) + (r.identity_error > 1e-10 ? 1 : 0);
        worst_identity = std::max(worst_identity, r.identity_error);
    }
    Outcome o;
    o.status = violations == 0 ? kExitOk : kExitFailure;
    if (violations > 0) {
        o.messages.push_back("bounds-suite: " + std::to_string(violations) + " violations");
    }
    if (ctx.csv()) {
        Csv c(ctx);
        c.row("trial", "dim", "blocks", "distance", "fidelity", "contained", "identity_error", "mixed_contained");
        for (std::size_t t = 0; t < out.size(); ++t) {
            const auto &r = out[t];
            c.row(t, r.dim, r.blocks, r.distance, r.fidelity, r.contained, r.identity_error, r.mixed_contained);
        }
        o.payload = c.str();
        return o;
    }
    Json r;
    r["trials"] = trials;
    r["max_dim"] = max_dim;
    r["violations"] = violations;
    r["max_identity_error"] = worst_identity;
    Json rows = Json::array();
    for (const auto &t : out) {
        Json x;
        x["dim"] = t.dim;
        x["blocks"] = t.blocks;
        x["distance"] = t.distance;
        x["fidelity"] = t.fidelity;
        x["contained"] = t.contained && t.mixed_contained;
        x["identity_error"] = t.identity_error;
        rows.push_back(std::move(x));
    }
    r["cases"] = std::move(rows);
    o.payload = ctx.envelope(std::move(r));
    return o;
}

Json acceptance_json(const std::vector<CriterionResult> &results) {
    Json arr = Json::array();
    std::size_t passed = 0;
    for (const auto &c : results) {
        Json x;
        x["id"] = c.id;
        x["name"] = c.name;
        x["passed"] = c.passed;
        x["detail"] = c.detail;
        arr.push_back(std::move(x));
        passed += c.passed ? 1 : 0;
    }
    Json r;
    r["criteria"] = std::move(arr);
    r["passed"] = passed;
    r["failed"] = results.size() - passed;
    return r;
}

Outcome finish_accept(const Context &ctx, const std::vector<CriterionResult> &results) {
    Outcome o;
    for (const auto &c : results) {
        o.status = c.passed ? o.status : kExitFailure;
    }
    if (ctx.csv()) {
        Csv c(ctx);
        c.row("id", "name", "passed", "detail");
        for (const auto &r : results) {
            c.row(r.id, r.name, r.passed, r.detail);
        }
        o.payload = c.str();
    } else {
        o.payload = ctx.envelope(acceptance_json(results));
    }
    return o;
}

// ---------------------------------------------------------------------------

std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path + ": cannot open config file");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool needs_config(const std::string &kind) { return kind != "bounds-suite" && kind != "accept"; }

/// Loads the config, checks the envelope fields and builds the context.
std::optional<json> load(const Request &req, std::optional<std::uint64_t> &seed, std::string &hash) {
    std::optional<json> cfg;
    if (req.config) {
        cfg = *req.config;
    } else if (req.config_path) {
        cfg = parse_config_text(read_text(*req.config_path), *req.config_path);
    }
    if (cfg && !cfg->is_object()) {
        throw ConfigError("config: expected an object at the top level");
    }
    if (!cfg && needs_config(req.kind)) {
        throw ConfigError(req.kind + ": --config is required");
    }
    if (req.format != "json" && req.format != "csv") {
        throw ConfigError("--format: expected json or csv");
    }
    seed = req.seed;
    if (cfg) {
        if (cfg->contains("kind")) {
            const auto k = read_string((*cfg)["kind"], "config.kind");
            if (k != req.kind) {
                throw ConfigError("config.kind: '" + k + "' does not match the subcommand '" + req.kind + "'");
            }
        }
        if (!seed && cfg->contains("seed")) {
            seed = read_uint((*cfg)["seed"], "config.seed");
        }
    }
    json effective;
    effective["kind"] = req.kind;
    effective["config"] = cfg ? *cfg : json(nullptr);
    effective["seed"] = seed ? json(*seed) : json(nullptr);
    effective["trials"] = req.trials ? json(*req.trials) : json(nullptr);
    effective["dim"] = req.dim ? json(*req.dim) : json(nullptr);
    effective["format"] = req.format;
    hash = fnv1a_hex(effective.dump());
    return cfg;
}

Outcome dispatch(const Context &ctx, const std::optional<json> &cfg,
                 const std::function<void(const CriterionResult &)> &on_result) {
    const auto &kind = ctx.request.kind;
    if (kind == "bounds-suite") {
        return run_bounds_suite(ctx, cfg ? &*cfg : nullptr);
    }
    if (kind == "accept") {
        if (cfg) {
            Fields f(*cfg, "config");
            f.optional("kind");
            f.optional("seed");
            f.finish();
        }
        AcceptanceOptions opts;
        opts.on_result = on_result;
        return finish_accept(ctx, run_acceptance(opts));
    }
    Fields f(*cfg, "config");
    f.optional("kind");
    f.optional("seed");
    if (kind == "validate") {
        return run_validate(ctx, f);
    }
    if (kind == "reduce") {
        return run_reduce(ctx, f);
    }
    if (kind == "distance") {
        return run_distance(ctx, f);
    }
    if (kind == "sieve") {
        return run_sieve(ctx, f);
    }
    if (kind == "history") {
        return run_history(ctx, f);
    }
    if (kind == "ensemble") {
        return run_ensemble(ctx, f);
    }
    throw ConfigError("unknown kind '" + kind + "'");
}

Outcome guarded(const Request &req, const std::function<void(const CriterionResult &)> &on_result) {
    try {
        std::optional<std::uint64_t> seed;
        std::string hash;
        const auto cfg = load(req, seed, hash);
        const Context ctx{req, seed, hash};
        return dispatch(ctx, cfg, on_result);
    } catch (const ConfigError &e) {
        return {kExitUsage, "", {std::string("error: ") + e.what()}};
    } catch (const nlohmann::json::exception &e) {
        return {kExitUsage, "", {std::string("error: config: ") + e.what()}};
    } catch (const std::exception &e) {
        return {kExitFailure, "", {std::string("error: ") + e.what()}};
    }
}

void write_atomic(const std::string &path, const std::string &text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error(path + ": cannot open for writing");
        }
        out << text;
        out.flush();
        if (!out) {
            throw std::runtime_error(path + ": write failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error(path + ": rename failed");
    }
}

} // namespace

const std::vector<std::string> &kinds() {
    static const std::vector<std::string> k{"validate", "reduce",       "distance", "sieve",
                                            "history",  "ensemble", "bounds-suite", "accept"};
    return k;
}

std::string version() { return REDUXON_VERSION; }

Outcome execute(const Request &request) { return guarded(request, {}); }

int run(const Request &request, std::ostream &out, std::ostream &diag) {
    // acceptance lines stream as each criterion finishes
    std::function<void(const CriterionResult &)> on_result;
    if (request.kind == "accept") {
        on_result = [&out](const CriterionResult &r) { out << format_result(r) << std::endl; };
    }
    Outcome o = guarded(request, on_result);
    for (const auto &m : o.messages) {
        diag << m << "\n";
    }
    if (o.payload.empty()) {
        return o.status;
    }
    if (request.out) {
        try {
            write_atomic(*request.out, o.payload);
        } catch (const std::exception &e) {
            diag << "error: " << e.what() << "\n";
            return kExitFailure;
        }
    } else if (request.kind != "accept") {
        out << o.payload;
    }
    return o.status;
}

int main(int argc, char **argv) {
    CLI::App app{"reduxon: quantum state reduction experiments"};
    app.set_version_flag("--version", version());
    Request req;
    std::string kind;
    std::string config_path, out_path;
    std::uint64_t seed = 0;
    std::size_t trials = 0, dim = 0;
    app.add_option("kind", kind, "Experiment kind")->required()->check(CLI::IsMember(kinds()));
    auto *o_config = app.add_option("--config", config_path, "Config JSON file");
    auto *o_seed = app.add_option("--seed", seed, "Master seed (overrides the config)");
    auto *o_out = app.add_option("--out", out_path, "Write the result here instead of stdout");
    app.add_option("--format", req.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    auto *o_trials = app.add_option("--trials", trials, "Trial or run count");
    auto *o_dim = app.add_option("--dim", dim, "Largest dimension for bounds-suite");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    req.kind = kind;
    if (*o_config) {
        req.config_path = config_path;
    }
    if (*o_seed) {
        req.seed = seed;
    }
    if (*o_out) {
        req.out = out_path;
    }
    if (*o_trials) {
        req.trials = trials;
    }
    if (*o_dim) {
        req.dim = dim;
    }
    return run(req, std::cout, std::cerr);
}

} // namespace reduxon::cli
