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


#include "reduxon/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace reduxon {

// ---------------------------------------------------------------------------
// Printer

std::string format_double(double v) {
    if (!std::isfinite(v)) {
        return "null";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

bool is_scalar(const Json &v) { return !v.is_object() && !v.is_array(); }

void print_scalar(const Json &v, std::string &out) {
    if (v.is_number_float()) {
        out += format_double(v.get<double>());
    } else {
        out += v.dump();
    }
}

void print(const Json &v, int indent, int depth, std::string &out) {
    const bool pretty = indent > 0;
    auto newline = [&](int d) {
        if (pretty) {
            out += '\n';
            out.append(static_cast<std::size_t>(indent * d), ' ');
        }
    };
    if (v.is_object()) {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) {
                out += ',';
            }
            first = false;
            newline(depth + 1);
            out += Json(it.key()).dump();
            out += pretty ? ": " : ":";
            print(it.value(), indent, depth + 1, out);
        }
        newline(depth);
        out += '}';
    } else if (v.is_array()) {
        if (v.empty()) {
            out += "[]";
            return;
        }
        const bool flat = std::all_of(v.begin(), v.end(), is_scalar);
        out += '[';
        bool first = true;
        for (const auto &e : v) {
            if (!first) {
                out += pretty && flat ? ", " : ",";
            }
            first = false;
            if (!flat) {
                newline(depth + 1);
            }
            print(e, indent, depth + 1, out);
        }
        if (!flat) {
            newline(depth);
        }
        out += ']';
    } else {
        print_scalar(v, out);
    }
}

} // namespace

std::string dump_json(const Json &value, int indent) {
    std::string out;
    print(value, indent, 0, out);
    if (indent > 0) {
        out += '\n';
    }
    return out;
}

std::string fnv1a_hex(const std::string &bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Encoders

Json to_json(const SpaceLayout &layout) { return Json(layout.dims()); }

Json to_json(const Operator &op) {
    const Matrix &m = op.matrix();
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        Json c = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            r.push_back(m(i, j).real());
            c.push_back(m(i, j).imag());
        }
        re.push_back(std::move(r));
        im.push_back(std::move(c));
    }
    Json out = Json::object();
    out["dims"] = to_json(op.layout());
    out["re"] = std::move(re);
    out["im"] = std::move(im);
    return out;
}

Json to_json(const DensityOperator &rho) { return to_json(rho.as_operator()); }

Json to_json(const ProjectorSet &pset) {
    Json out = Json::object();
    out["layout"] = to_json(pset.layout());
    out["active_set"] = Json(pset.active_set());
    Json ops = Json::array();
    for (const auto &p : pset.active_projectors()) {
        ops.push_back(to_json(p));
    }
    out["projectors"] = std::move(ops);
    if (!pset.labels().empty()) {
        out["labels"] = Json(pset.labels());
    }
    return out;
}

Json to_json(const ValidationReport &report) {
    Json out = Json::object();
    out["hermiticity"] = report.hermiticity;
    out["idempotence"] = report.idempotence;
    out["orthogonality"] = report.orthogonality;
    out["completeness"] = report.completeness;
    out["tolerance"] = report.tolerance;
    out["passed"] = report.passed();
    return out;
}

Json to_json(const WeightVector &w) { return Json(w.values()); }

Json to_json(const ReducedState &state) {
    Json out = Json::object();
    out["weights"] = to_json(state.weights);
    out["branch_indices"] = Json(state.branch_indices());
    out["hat"] = to_json(state.hat);
    Json cond = Json::array();
    for (std::size_t i = 0; i < state.conditional.size(); ++i) {
        if (state.conditional[i]) {
            Json c = Json::object();
            c["branch"] = i;
            c["state"] = to_json(*state.conditional[i]);
            cond.push_back(std::move(c));
        }
    }
    out["conditional_states"] = std::move(cond);
    return out;
}

Json to_json(const DistanceReport &report) {
    Json out = Json::object();
    out["value"] = report.value;
    out["lower_bound"] = report.lower_bound ? Json(*report.lower_bound) : Json(nullptr);
    out["upper_bound"] = report.upper_bound ? Json(*report.upper_bound) : Json(nullptr);
    out["metric_name"] = report.metric_name;
    return out;
}

Json to_json(const SieveResult &result) {
    Json out = Json::object();
    out["best_index"] = result.best_index;
    out["best_id"] = result.landscape.at(result.best_index).id;
    out["best_G"] = result.best_G;
    out["best_pset"] = to_json(result.best_pset);
    Json land = Json::array();
    for (const auto &p : result.landscape) {
        Json e = Json::object();
        e["id"] = p.id;
        e["params"] = Json(p.params);
        e["G"] = p.G;
        land.push_back(std::move(e));
    }
    out["landscape"] = std::move(land);
    return out;
}

Json to_json(const HistoryRecord &record) {
    Json out = Json::object();
    Json events = Json::array();
    for (std::size_t j = 0; j < record.event_weights.size(); ++j) {
        Json e = Json::object();
        e["index"] = j;
        e["weights"] = to_json(record.event_weights[j]);
        if (j < record.sampled.size()) {
            e["sampled"] = record.sampled[j];
        }
        events.push_back(std::move(e));
    }
    out["events"] = std::move(events);
    out["sampled"] = Json(record.sampled);
    out["final_state"] = to_json(record.final_state);
    out["final_reduced"] = record.final_reduced ? to_json(*record.final_reduced) : Json(nullptr);
    return out;
}

Json to_json(const FrequencyReport &report) {
    Json out = Json::object();
    out["runs"] = report.runs;
    Json branches = Json::array();
    for (std::size_t i = 0; i < report.counts.size(); ++i) {
        Json b = Json::object();
        b["branch"] = i;
        b["count"] = report.counts[i];
        b["frequency"] = report.frequencies[i];
        b["weight"] = report.weights[i];
        b["radius"] = report.radii[i];
        b["flagged"] = static_cast<bool>(report.flagged[i]);
        branches.push_back(std::move(b));
    }
    out["branches"] = std::move(branches);
    out["flag_count"] = report.flag_count();
    return out;
}

// ---------------------------------------------------------------------------
// Reader

nlohmann::json parse_config_text(const std::string &text, const std::string &source) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string what = e.what();
        if (const auto pos = what.find("syntax error"); pos != std::string::npos) {
            what = what.substr(pos);
        }
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
    }
}

Fields::Fields(const nlohmann::json &value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) {
        throw ConfigError(path_ + ": expected an object");
    }
}

bool Fields::has(const std::string &key) const { return value_.contains(key); }

const nlohmann::json &Fields::required(const std::string &key) {
    if (!value_.contains(key)) {
        throw ConfigError(path_ + ": missing required field '" + key + "'");
    }
    used_.insert(key);
    return value_.at(key);
}

const nlohmann::json *Fields::optional(const std::string &key) {
    if (!value_.contains(key)) {
        return nullptr;
    }
    used_.insert(key);
    return &value_.at(key);
}

double Fields::number(const std::string &key) { return read_number(required(key), child(key)); }

double Fields::number_or(const std::string &key, double fallback) {
    const auto *v = optional(key);
    return v ? read_number(*v, child(key)) : fallback;
}

std::uint64_t Fields::uint(const std::string &key) { return read_uint(required(key), child(key)); }

std::uint64_t Fields::uint_or(const std::string &key, std::uint64_t fallback) {
    const auto *v = optional(key);
    return v ? read_uint(*v, child(key)) : fallback;
}

std::string Fields::string(const std::string &key) { return read_string(required(key), child(key)); }

std::string Fields::string_or(const std::string &key, const std::string &fallback) {
    const auto *v = optional(key);
    return v ? read_string(*v, child(key)) : fallback;
}

bool Fields::boolean_or(const std::string &key, bool fallback) {
    const auto *v = optional(key);
    if (!v) {
        return fallback;
    }
    if (!v->is_boolean()) {
        throw ConfigError(child(key) + ": expected true or false");
    }
    return v->get<bool>();
}

void Fields::finish() const {
    for (auto it = value_.begin(); it != value_.end(); ++it) {
        if (!used_.count(it.key())) {
            throw ConfigError(path_ + ": unknown field '" + it.key() + "'");
        }
    }
}

double read_number(const nlohmann::json &v, const std::string &path) {
    if (!v.is_number()) {
        throw ConfigError(path + ": expected a number");
    }
    return v.get<double>();
}

std::uint64_t read_uint(const nlohmann::json &v, const std::string &path) {
    if (v.is_number_unsigned()) {
        return v.get<std::uint64_t>();
    }
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw ConfigError(path + ": expected a nonnegative integer");
}

std::string read_string(const nlohmann::json &v, const std::string &path) {
    if (!v.is_string()) {
        throw ConfigError(path + ": expected a string");
    }
    return v.get<std::string>();
}

const nlohmann::json &read_array(const nlohmann::json &v, const std::string &path) {
    if (!v.is_array()) {
        throw ConfigError(path + ": expected an array");
    }
    return v;
}

std::vector<double> read_numbers(const nlohmann::json &v, const std::string &path) {
    std::vector<double> out;
    std::size_t i = 0;
    for (const auto &e : read_array(v, path)) {
        out.push_back(read_number(e, path + "[" + std::to_string(i++) + "]"));
    }
    return out;
}

std::vector<std::size_t> read_indices(const nlohmann::json &v, const std::string &path) {
    std::vector<std::size_t> out;
    std::size_t i = 0;
    for (const auto &e : read_array(v, path)) {
        out.push_back(static_cast<std::size_t>(read_uint(e, path + "[" + std::to_string(i++) + "]")));
    }
    return out;
}

namespace {

Eigen::MatrixXd read_real_matrix(const nlohmann::json &v, const std::string &path, std::size_t n) {
    const auto &rows = read_array(v, path);
    if (rows.size() != n) {
        throw ConfigError(path + ": expected " + std::to_string(n) + " rows, got " + std::to_string(rows.size()));
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const std::string rp = path + "[" + std::to_string(i) + "]";
        const auto row = read_numbers(rows[i], rp);
        if (row.size() != n) {
            throw ConfigError(rp + ": expected " + std::to_string(n) + " entries, got " + std::to_string(row.size()));
        }
        for (std::size_t j = 0; j < n; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
        }
    }
    return m;
}

} // namespace

Operator read_operator(const nlohmann::json &v, const std::string &path) {
    Fields f(v, path);
    const auto dims = read_indices(f.required("dims"), f.child("dims"));
    SpaceLayout layout;
    try {
        layout = SpaceLayout(dims);
    } catch (const Error &e) {
        throw ConfigError(f.child("dims") + ": " + e.what());
    }
    if (layout.total_dim() > kMaxDenseDim) {
        throw ConfigError(f.child("dims") + ": dimension " + std::to_string(layout.total_dim()) +
                          " exceeds the dense limit " + std::to_string(kMaxDenseDim));
    }
    const auto n = layout.total_dim();
    const Eigen::MatrixXd re = read_real_matrix(f.required("re"), f.child("re"), n);
    Eigen::MatrixXd im = Eigen::MatrixXd::Zero(re.rows(), re.cols());
    if (const auto *j = f.optional("im")) {
        im = read_real_matrix(*j, f.child("im"), n);
    }
    f.finish();
    Matrix m(re.rows(), re.cols());
    m.real() = re;
    m.imag() = im;
    return Operator(layout, m);
}

} // namespace reduxon
