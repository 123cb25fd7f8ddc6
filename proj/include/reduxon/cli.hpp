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
 * The reduxon command line: one binary, one subcommand per experiment kind.
 *
 *     reduxon <kind> [--config PATH] [--seed N] [--out PATH]
 *                    [--format json|csv] [--trials N] [--dim N]
 *
 * Exit status is 0 on success, 1 for usage or configuration errors and 2
 * when a library invariant or a requested check fails.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace reduxon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

const std::vector<std::string> &kinds();
std::string version();

struct Request {
    std::string kind;
    std::optional<std::string> config_path;
    /// Used instead of reading config_path when set.
    std::optional<nlohmann::json> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::string format = "json";
    std::optional<std::size_t> trials;
    std::optional<std::size_t> dim;
};

struct Outcome {
    int status = kExitOk;
    std::string payload;
    /// Human-readable lines for the terminal (acceptance results, errors).
    std::vector<std::string> messages;
};

/// Builds the result without touching the filesystem (apart from reading
/// the config).
Outcome execute(const Request &request);

/// execute() then write the payload to request.out (atomically) or to
/// `out`. Messages go to `diag`.
int run(const Request &request, std::ostream &out, std::ostream &diag);

int main(int argc, char **argv);

} // namespace reduxon::cli
