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

#include <doctest.h>

#include "isac/conic.hpp"
#include "isac/hermitian.hpp"

#include <random>

using namespace isac;
using namespace isac::conic;

TEST_CASE("conic: small linear program")
{
    Problem p;
    p.cones.nonneg = 2;
    p.c = RVector::Ones(2);
    p.A = RMatrix(1, 2);
    p.A << 1.0, 2.0;
    p.b = RVector::Constant(1, 2.0);
    const Solution s = solve(p);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(s.x(0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(s.x(1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("conic: second-order cone epigraph of a fixed vector")
{
    // min t s.t. (t, u1, u2) in SOC, u = (3, 4)
    Problem p;
    p.cones.soc = {3};
    p.c = RVector::Zero(3);
    p.c(0) = 1.0;
    p.A = RMatrix::Zero(2, 3);
    p.A(0, 1) = 1.0;
    p.A(1, 2) = 1.0;
    p.b = RVector(2);
    p.b << 3.0, 4.0;
    const Solution s = solve(p);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.primal_objective == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("conic: Hermitian SDP recovers the smallest eigenvalue")
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    const int n = 6;
    CMatrix C(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) C(i, j) = Complex(nd(rng), nd(rng));
    C = (C + C.adjoint()).eval();

    Problem p;
    p.cones.hpsd = {n};
    p.c = hvec(C);
    p.A = hvec(CMatrix::Identity(n, n)).transpose();
    p.b = RVector::Ones(1);
    const Solution s = solve(p);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.primal_objective == doctest::Approx(min_eigenvalue(C)).epsilon(1e-6));
    const CMatrix X = hmat(s.x, n);
    CHECK(min_eigenvalue(X) > -1e-8);
}

TEST_CASE("conic: mixed cones")
{
    // min t s.t. ||(Re X01, Im X01)*sqrt2|| <= t, X psd 2x2, X00 = 1, X11 = 1, Re X01 >= 0.5 via slack
    Problem p;
    p.cones.nonneg = 1;
    p.cones.soc = {3};
    p.cones.hpsd = {2};
    const int n = p.cones.dimension(); // 1 + 3 + 4
    p.c = RVector::Zero(n);
    p.c(1) = 1.0;
    p.A = RMatrix::Zero(5, n);
    p.b = RVector::Zero(5);
    const int o = p.cones.hpsd_offset(0);
    p.A(0, o) = 1.0;            p.b(0) = 1.0;   // X00
    p.A(1, o + 1) = 1.0;        p.b(1) = 1.0;   // X11
    p.A(2, 2) = 1.0; p.A(2, o + 2) = -1.0;      // u1 = sqrt2 Re X01
    p.A(3, 3) = 1.0; p.A(3, o + 3) = -1.0;      // u2 = sqrt2 Im X01
    p.A(4, o + 2) = 1.0 / std::sqrt(2.0); p.A(4, 0) = -1.0; p.b(4) = 0.5; // Re X01 - s = 0.5
    const Solution s = solve(p);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.primal_objective == doctest::Approx(std::sqrt(2.0) * 0.5).epsilon(1e-6));
}

TEST_CASE("conic: infeasibility and unboundedness are certified")
{
    Problem p;
    p.cones.nonneg = 2;
    p.c = RVector::Ones(2);
    p.A = RMatrix::Ones(1, 2);
    p.b = RVector::Constant(1, -1.0);
    CHECK(solve(p).status == Status::primal_infeasible);

    Problem u;
    u.cones.nonneg = 2;
    u.c = RVector(2);
    u.c << -1.0, 0.0;
    u.A = RMatrix(1, 2);
    u.A << 1.0, -1.0;
    u.b = RVector::Zero(1);
    CHECK(solve(u).status == Status::dual_infeasible);
}
