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

#pragma once

#include <span>
#include <vector>

#include "reduxon/hilbert.hpp"

namespace reduxon::detail {

/// Full-space index offsets of every basis state of the listed subsystems
/// (row-major over the subset), with all other subsystems at digit 0.
std::vector<std::size_t> subset_offsets(const SpaceLayout &layout,
                                        std::span<const std::size_t> subset);

} // namespace reduxon::detail
