// SPDX-License-Identifier: Apache-2.0
//
// isac-afbf: ambiguity-function-aware ISAC transmit beamforming
// Copyright (C) 2026 The isac-afbf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "isac/types.hpp"

#include <string>
#include <vector>

namespace isac::conic {

/// Variable layout: `nonneg` scalars, then each second-order cone
/// (t, u) with t >= ||u||, then each Hermitian PSD block in hvec coordinates.
struct ConeSpec {
    int nonneg = 0;
    std::vector<int> soc;   // dimensions including the t component
    std::vector<int> hpsd;  // complex matrix orders

    int dimension() const;
    int degree() const;     // barrier parameter: nonneg + #soc + sum of orders
    int hpsd_offset(std::size_t block) const;
    int soc_offset(std::size_t cone) const;
};

/// minimize c^T x  subject to  A x = b,  x in K.
/// Dual: maximize b^T y  subject to  A^T y + z = c,  z in K.
struct Problem {
    RVector c;
    RMatrix A;
    RVector b;
    ConeSpec cones;

    void validate() const;
};

enum class Status { optimal, near_optimal, primal_infeasible, dual_infeasible, max_iterations, numerical_error };

std::string to_string(Status s);

struct Options {
    double relative_gap = 1e-7;
    double absolute_gap = 1e-10;
    double feasibility_tol = 1e-8;
    int max_iterations = 120;
    bool verbose = false;
};

struct Solution {
    Status status = Status::numerical_error;
    RVector x, y, z;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double gap = 0.0;            // x . z
    double relative_gap = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    std::string message;

    bool usable() const { return status == Status::optimal || status == Status::near_optimal; }
};

/// Homogeneous self-dual primal-dual interior-point method with Nesterov-Todd
/// scaling and Mehrotra predictor-corrector steps. Deterministic.
Solution solve(const Problem& problem, const Options& options = {});

} // namespace isac::conic
