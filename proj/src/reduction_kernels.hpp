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

#include <vector>

#include "reduxon/hilbert.hpp"
#include "reduxon/projector.hpp"

namespace reduxon::detail {

/// Index offsets splitting the full space into active (A) and inactive (B)
/// digits: full index = a[i] + b[j].
struct ActiveSplit {
    explicit ActiveSplit(const ProjectorSet &pset);
    std::vector<std::size_t> a;
    std::vector<std::size_t> b;
};

/// (op_a (x) 1_B) m
Matrix apply_left(const Matrix &op_a, const Matrix &m, const ActiveSplit &split);
/// (p_a (x) 1_B) m (p_a (x) 1_B), p_a Hermitian
Matrix sandwich(const Matrix &p_a, const Matrix &m, const ActiveSplit &split);
/// tr_A((op_a (x) 1_B) m)
Matrix trace_active_with(const Matrix &op_a, const Matrix &m, const ActiveSplit &split);
/// Re tr(rho p)
double weight_of(const Matrix &rho, const Matrix &p);

} // namespace reduxon::detail
