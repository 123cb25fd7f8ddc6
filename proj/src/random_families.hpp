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


// Random projector families for sweeps. Library-internal.
#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "reduxon/projector.hpp"

namespace reduxon::detail {

/// Random composition of n into at least min(min_blocks, n) positive parts.
inline std::vector<std::size_t> random_ranks(std::size_t n, Rng &rng, std::size_t min_blocks = 2) {
    min_blocks = std::min(min_blocks, n);
    std::uniform_int_distribution<std::size_t> blocks_dist(min_blocks, n);
    const std::size_t blocks = blocks_dist(rng);
    // choose blocks-1 distinct cut points in 1..n-1
    std::vector<std::size_t> cuts(n - 1);
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        cuts[i] = i + 1;
    }
    std::shuffle(cuts.begin(), cuts.end(), rng);
    cuts.resize(blocks - 1);
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::size_t> ranks;
    std::size_t prev = 0;
    for (auto c : cuts) {
        ranks.push_back(c - prev);
        prev = c;
    }
    ranks.push_back(n - prev);
    return ranks;
}

inline ProjectorSet random_total_pset(const SpaceLayout &layout, Rng &rng, std::size_t min_blocks = 2) {
    const auto n = layout.total_dim();
    const auto ranks = random_ranks(n, rng, min_blocks);
    return basis_partition(layout, Operator(layout, haar_unitary(n, rng)), ranks);
}

inline ProjectorSet random_partial_pset(const SpaceLayout &layout, std::span<const std::size_t> active, Rng &rng,
                                        std::size_t min_blocks = 2) {
    const SpaceLayout la = layout.restrict_to(active);
    const auto n = la.total_dim();
    const auto ranks = random_ranks(n, rng, min_blocks);
    const auto local = basis_partition(la, Operator(la, haar_unitary(n, rng)), ranks);
    return ProjectorSet::partial(layout, active, local.projectors());
}

} // namespace reduxon::detail
