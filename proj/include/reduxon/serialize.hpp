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
 * JSON encoding of library values and a strict reader for configuration
 * documents.
 *
 * Output is written by a private printer: doubles always carry 17
 * significant digits, keys keep insertion order, and the same value always
 * prints to the same bytes. Non-finite doubles print as null.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "reduxon/dynamics.hpp"
#include "reduxon/entropy_sieve.hpp"
#include "reduxon/metrics.hpp"
#include "reduxon/projector.hpp"
#include "reduxon/reduction.hpp"

namespace reduxon {

using Json = nlohmann::ordered_json;

/// Malformed or unrecognized configuration. Distinct from Error, which
/// signals an invariant violation inside the library.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Pretty (indent > 0) or compact (indent = 0) rendering.
std::string dump_json(const Json &value, int indent = 2);

std::string format_double(double v);

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string &bytes);

Json to_json(const SpaceLayout &layout);
Json to_json(const Operator &op);
Json to_json(const DensityOperator &rho);
Json to_json(const ProjectorSet &pset);
Json to_json(const ValidationReport &report);
Json to_json(const WeightVector &w);
Json to_json(const ReducedState &state);
Json to_json(const DistanceReport &report);
Json to_json(const SieveResult &result);
Json to_json(const HistoryRecord &record);
Json to_json(const FrequencyReport &report);

// ---------------------------------------------------------------------------
// Strict reading

/// Parses text, turning syntax errors into ConfigError with line and column.
nlohmann::json parse_config_text(const std::string &text, const std::string &source);

/// View of one JSON object that remembers which keys were consumed, so that
/// finish() can reject the rest.
class Fields {
  public:
    Fields(const nlohmann::json &value, std::string path);

    [[nodiscard]] const std::string &path() const { return path_; }
    [[nodiscard]] std::string child(const std::string &key) const { return path_ + "." + key; }
    [[nodiscard]] bool has(const std::string &key) const;

    const nlohmann::json &required(const std::string &key);
    const nlohmann::json *optional(const std::string &key);

    double number(const std::string &key);
    double number_or(const std::string &key, double fallback);
    std::uint64_t uint(const std::string &key);
    std::uint64_t uint_or(const std::string &key, std::uint64_t fallback);
    std::string string(const std::string &key);
    std::string string_or(const std::string &key, const std::string &fallback);
    bool boolean_or(const std::string &key, bool fallback);

    /// Throws ConfigError naming the first key that was never consumed.
    void finish() const;

  private:
    const nlohmann::json &value_;
    std::string path_;
    std::set<std::string> used_;
};

double read_number(const nlohmann::json &v, const std::string &path);
std::uint64_t read_uint(const nlohmann::json &v, const std::string &path);
std::string read_string(const nlohmann::json &v, const std::string &path);
std::vector<double> read_numbers(const nlohmann::json &v, const std::string &path);
std::vector<std::size_t> read_indices(const nlohmann::json &v, const std::string &path);
const nlohmann::json &read_array(const nlohmann::json &v, const std::string &path);

/// {dims, re, im}; im may be omitted for real matrices.
Operator read_operator(const nlohmann::json &v, const std::string &path);

} // namespace reduxon
