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
 * The acceptance suite: ten pass/fail criteria over the identities and
 * bounds the library is meant to reproduce, each with pinned tolerances
 * and seeds.
 */
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace reduxon {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

struct AcceptanceOptions {
    /// Directory for the byte-comparison outputs of criterion 10; a fresh
    /// temporary directory when empty.
    std::string scratch_dir;
    /// Called after each criterion finishes.
    std::function<void(const CriterionResult &)> on_result;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions &options = {});

/// "PASS  1 name: detail" style line.
std::string format_result(const CriterionResult &r);

} // namespace reduxon
