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

// Runs the ten acceptance criteria and prints one line per criterion.

#include <iostream>

#include "reduxon/acceptance.hpp"

int main() {
    reduxon::AcceptanceOptions opts;
    opts.on_result = [](const reduxon::CriterionResult &r) {
        std::cout << reduxon::format_result(r) << std::endl;
    };
    const auto results = reduxon::run_acceptance(opts);
    std::size_t failed = 0;
    for (const auto &r : results) {
        failed += r.passed ? 0 : 1;
    }
    std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
