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

#include "reduxon/entropy_sieve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "reduxon/parallel.hpp"
#include "reduxon/reduction.hpp"

namespace reduxon {

double entropy(const DensityOperator &rho) {
    const auto es = eigh(rho.matrix());
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.values.size(); ++i) {
        s -= xlnx(es.values(i));
    }
    return std::max(0.0, s);
}

SieveEvaluation evaluate_sieve(const DensityOperator &rho_a, const ProjectorSet &pset,
                               const Propagator &propagator, double dt) {
    const auto first = reduce(rho_a, pset);
    const auto n = static_cast<Eigen::Index>(pset.size());
    SieveEvaluation out;
    out.weights = first.weights.values();
    out.second_weights = Eigen::MatrixXd::Zero(n, n);
    for (auto i : first.branch_indices()) {
        const double w = first.weights[i];
        const DensityOperator branch_a = first.branch_state(i);
        const DensityOperator branch_b = propagator.evolve(branch_a, dt);
        const auto second = reduce(branch_b, pset);
        const double s_hat = entropy(second.hat);
        out.G += w * (s_hat - entropy(branch_a));
        out.G_after += w * (s_hat - entropy(branch_b));
        for (Eigen::Index j = 0; j < n; ++j) {
            out.second_weights(static_cast<Eigen::Index>(i), j) = second.weights[static_cast<std::size_t>(j)];
        }
    }
    if (std::abs(out.G - out.G_after) > 1e-10) {
        throw Error("entropy not conserved across the sieve window (G forms differ by " +
                    std::to_string(std::abs(out.G - out.G_after)) + ")");
    }
    return out;
}

static void check_config(const SieveConfig &config) {
    if (!(config.dt > 0.0)) {
        throw Error("sieve window dt must be positive");
    }
}

static void require_valid(const ProjectorSet &pset) {
    if (!validate(pset).passed()) {
        throw Error("sieve: candidate projector set fails validation");
    }
}

double sieve_G(const DensityOperator &rho_a, const ProjectorSet &pset, const SieveConfig &config) {
    if (rho_a.layout() != pset.layout()) {
        throw Error("sieve_G: projector set layout mismatch");
    }
    require_valid(pset);
    const Propagator propagator(config.hamiltonian);
    return evaluate_sieve(rho_a, pset, propagator, config.dt).G;
}

namespace {

std::string params_id(const std::vector<double> &p) {
    std::ostringstream os;
    os.precision(17);
    os << "params[";
    for (std::size_t i = 0; i < p.size(); ++i) {
        os << (i ? "," : "") << p[i];
    }
    os << "]";
    return os.str();
}

SieveResult pick_best(std::vector<LandscapePoint> landscape, const std::vector<ProjectorSet> &psets) {
    SieveResult r;
    r.best_index = 0;
    for (std::size_t i = 1; i < landscape.size(); ++i) {
        if (landscape[i].G < landscape[r.best_index].G) {
            r.best_index = i;
        }
    }
    r.best_G = landscape[r.best_index].G;
    r.best_pset = psets[r.best_index];
    r.landscape = std::move(landscape);
    return r;
}

SieveResult search_list(const DensityOperator &rho, const Propagator &prop, double dt,
                        const std::vector<ProjectorSet> &psets, std::vector<LandscapePoint> points,
                        std::size_t threads) {
    if (psets.empty()) {
        throw Error("sieve candidate list is empty");
    }
    for (const auto &p : psets) {
        if (p.layout() != rho.layout()) {
            throw Error("sieve: candidate layout does not match the state");
        }
        require_valid(p);
    }
    parallel_for(psets.size(), threads, [&](std::size_t i) {
        points[i].G = evaluate_sieve(rho, psets[i], prop, dt).G;
    });
    return pick_best(std::move(points), psets);
}

SieveResult nelder_mead(const DensityOperator &rho, const Propagator &prop, double dt,
                        const RotationSearch &s) {
    if (s.reference.layout() != rho.layout()) {
        throw Error("sieve: reference layout does not match the state");
    }
    require_valid(s.reference);
    const std::size_t n = rotation_parameter_count(s.reference);
    std::vector<double> start = s.start.empty() ? std::vector<double>(n, 0.0) : s.start;
    if (start.size() != n) {
        throw Error("rotation search start has " + std::to_string(start.size()) +
                    " parameters, expected " + std::to_string(n));
    }
    std::vector<LandscapePoint> landscape;
    std::vector<ProjectorSet> seen;
    auto eval = [&](const std::vector<double> &p) {
        auto pset = rotate_family(s.reference, p);
        const double g = evaluate_sieve(rho, pset, prop, dt).G;
        landscape.push_back({params_id(p), p, g});
        seen.push_back(std::move(pset));
        return g;
    };
    auto budget_left = [&] { return landscape.size() < s.max_evaluations; };

    struct Vertex {
        std::vector<double> x;
        double f;
    };
    std::vector<Vertex> simplex;
    simplex.push_back({start, eval(start)});
    for (std::size_t k = 0; k < n && budget_left(); ++k) {
        auto x = start;
        x[k] += s.initial_step;
        simplex.push_back({x, eval(x)});
    }
    auto combo = [](const std::vector<double> &a, const std::vector<double> &b, double t) {
        // a + t (b - a)
        std::vector<double> out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            out[i] = a[i] + t * (b[i] - a[i]);
        }
        return out;
    };
    while (simplex.size() == n + 1 && budget_left()) {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex &a, const Vertex &b) { return a.f < b.f; });
        if (simplex.back().f - simplex.front().f <= s.tolerance) {
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t i = 0; i < n; ++i) {
                centroid[i] += simplex[v].x[i] / static_cast<double>(n);
            }
        }
        auto &worst = simplex.back();
        const auto xr = combo(centroid, worst.x, -1.0);
        const double fr = eval(xr);
        if (fr < simplex.front().f) {
            if (!budget_left()) {
                worst = {xr, fr};
                break;
            }
            const auto xe = combo(centroid, worst.x, -2.0);
            const double fe = eval(xe);
            worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr < simplex[n - 1].f) {
            worst = {xr, fr};
        } else {
            if (!budget_left()) {
                break;
            }
            const auto xc = combo(centroid, worst.x, 0.5);
            const double fc = eval(xc);
            if (fc < worst.f) {
                worst = {xc, fc};
            } else {
                for (std::size_t v = 1; v <= n && budget_left(); ++v) {
                    simplex[v].x = combo(simplex.front().x, simplex[v].x, 0.5);
                    simplex[v].f = eval(simplex[v].x);
                }
            }
        }
    }
    return pick_best(std::move(landscape), seen);
}

} // namespace

SieveResult sieve_search(const DensityOperator &rho_a, const SieveConfig &config) {
    check_config(config);
    const Propagator prop(config.hamiltonian);
    return std::visit(
        [&](const auto &family) -> SieveResult {
            using T = std::decay_t<decltype(family)>;
            if constexpr (std::is_same_v<T, ExplicitCandidates>) {
                std::vector<LandscapePoint> points(family.psets.size());
                for (std::size_t i = 0; i < points.size(); ++i) {
                    points[i].id = i < family.names.size() ? family.names[i]
                                                           : "candidate[" + std::to_string(i) + "]";
                }
                return search_list(rho_a, prop, config.dt, family.psets, std::move(points),
                                   config.threads);
            } else if constexpr (std::is_same_v<T, RotationGrid>) {
                std::vector<ProjectorSet> psets;
                std::vector<LandscapePoint> points;
                for (const auto &p : family.points) {
                    psets.push_back(rotate_family(family.reference, p));
                    points.push_back({params_id(p), p, 0.0});
                }
                return search_list(rho_a, prop, config.dt, psets, std::move(points), config.threads);
            } else {
                return nelder_mead(rho_a, prop, config.dt, family);
            }
        },
        config.candidates);
}

} // namespace reduxon
