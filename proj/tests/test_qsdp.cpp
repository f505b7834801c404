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

#include "fixtures.hpp"
#include "isac/experiment.hpp"
#include "isac/hermitian.hpp"
#include "isac/qsdp.hpp"

using namespace isac;
using isac::testing::make_toy;
using isac::testing::random_beamformer;
using isac::testing::random_feasible_beamformer;
using isac::testing::random_psd;

namespace {

ConicSolution solve_toy(const isac::testing::Toy& t, const DesignConstraints& c)
{
    return solve(build_qsdp(c, t.channels, t.geometry, t.corr, t.mask, t.omega), 1e-8);
}

} // namespace

TEST_CASE("qsdp: objective rows reproduce the vectorized ISL")
{
    auto t = make_toy();
    SdrModel model(8, 2);
    const RMatrix rows = isl_objective_rows(model, t->geometry, t->corr, t->mask, 0.0, t->omega);
    REQUIRE(rows.cols() == model.dimension());
    CHECK(rows.rows() <= 2 * 2 * t->omega.size());
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<CMatrix> R{random_psd(rng, 8, 2), random_psd(rng, 8, 3)};
        RVector v(model.dimension());
        v << hvec(R[0]), hvec(R[1]);
        const double isl = isl_vectorized(R, t->geometry, t->corr, t->mask, 0.0, t->omega);
        CHECK((rows * v).squaredNorm() == doctest::Approx(isl).epsilon(1e-10));
    }
}

TEST_CASE("qsdp: reference problem dimensions")
{
    const ExperimentConfig cfg;
    auto sc = build_scenario(cfg);
    const ConicProblem p = build_qsdp(sc->constraints, sc->channels, sc->geometry, sc->corr, sc->mask, sc->omega);
    REQUIRE(p.psd_orders.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(p.psd_orders[static_cast<std::size_t>(k)] == 36);
        CHECK(p.real_embedding_order(k) == 72);
    }
    CHECK(p.sinr_constraints == 3);
    CHECK(p.power_constraints == 1);
    CHECK(p.gain_equalities == 1);
    CHECK(sc->omega.size() == 102);
    CHECK(p.norm_rows_original == 2 * 3 * 102);
    CHECK(p.norm_rows_compressed <= p.norm_rows_original);
}

TEST_CASE("qsdp: empty angle set gives a zero objective and a feasible point")
{
    auto t = make_toy(7, 8, 1);
    DesignConstraints c = t->constraints;
    const ConicSolution sol = solve(build_qsdp(c, t->channels, t->geometry, t->corr, t->mask, AngleGrid{}), 1e-8);
    REQUIRE(sol.usable());
    CHECK(std::abs(sol.objective) <= 1e-6);
    const CMatrix& R = sol.covariances.R[0];
    CHECK(R.trace().real() <= c.max_power_mw * (1.0 + 1e-6));
    const CVector b0 = steering_vector(t->geometry, 0.0, 0.0);
    CHECK(b0.dot(R * b0).real() == doctest::Approx(c.target_gain_mw).epsilon(1e-6));
    const CVector h = t->channels.h(0);
    CHECK(h.dot(R * h).real() / c.noise_power_mw >= c.min_sinr * (1.0 - 1e-6));
    CHECK(min_eigenvalue(R) >= -1e-8 * R.trace().real());
}

TEST_CASE("qsdp: unreachable SINR is reported infeasible")
{
    auto t = make_toy();
    DesignConstraints c = t->constraints;
    c.min_sinr = 1e9;
    CHECK(solve_toy(*t, c).status == SolveStatus::infeasible);
}

TEST_CASE("qsdp: gain beyond P_t M is rejected before solving")
{
    auto t = make_toy();
    DesignConstraints c = t->constraints;
    c.target_gain_mw = 8.5;
    CHECK_THROWS_AS(build_qsdp(c, t->channels, t->geometry, t->corr, t->mask, t->omega), InfeasibleError);
    c.target_gain_mw = 8.0;
    CHECK_NOTHROW(c.validate(8));
}

TEST_CASE("qsdp: solution is PSD and satisfies every constraint")
{
    auto t = make_toy();
    const DesignConstraints& c = t->constraints;
    const ConicSolution sol = solve_toy(*t, c);
    REQUIRE(sol.usable());
    const CMatrix RW = sol.covariances.total();
    CHECK(RW.trace().real() <= c.max_power_mw * (1.0 + 1e-6));
    const CVector b0 = steering_vector(t->geometry, 0.0, 0.0);
    CHECK(b0.dot(RW * b0).real() == doctest::Approx(c.target_gain_mw).epsilon(1e-6));
    const RVector s = user_sinr(sol.covariances.R, t->channels, c.noise_power_mw);
    for (int k = 0; k < 2; ++k) {
        CHECK(s(k) >= c.min_sinr * (1.0 - 1e-6));
        const CMatrix& R = sol.covariances.R[static_cast<std::size_t>(k)];
        CHECK(min_eigenvalue(R) >= -1e-8 * R.trace().real());
    }
    const double isl = isl_vectorized(sol.covariances.R, t->geometry, t->corr, t->mask, 0.0, t->omega);
    CHECK(sol.objective * sol.objective == doctest::Approx(isl).epsilon(1e-6));
}

TEST_CASE("qsdp: loosening the constraints never raises the optimum")
{
    auto t = make_toy();
    const ConicSolution base = solve_toy(*t, t->constraints);
    REQUIRE(base.usable());
    DesignConstraints loose = t->constraints;
    loose.max_power_mw *= 1.01;
    loose.min_sinr /= 1.01;
    const ConicSolution relaxed = solve_toy(*t, loose);
    REQUIRE(relaxed.usable());
    CHECK(relaxed.objective <= base.objective * (1.0 + 1e-6));
}

TEST_CASE("qsdp: optimum lower-bounds feasible rank-one beamformers")
{
    auto t = make_toy();
    const ConicSolution sol = solve_toy(*t, t->constraints);
    REQUIRE(sol.usable());
    const double bound = sol.objective * sol.objective;
    std::mt19937_64 rng(22);
    int found = 0;
    for (int attempt = 0; attempt < 2000 && found < 10; ++attempt) {
        const auto W = random_feasible_beamformer(rng, *t);
        if (!W) continue;
        ++found;
        std::vector<CMatrix> R;
        for (int k = 0; k < 2; ++k) R.push_back(W->col(k) * W->col(k).adjoint());
        CHECK(bound <= isl_vectorized(R, t->geometry, t->corr, t->mask, 0.0, t->omega) * (1.0 + 1e-6));
    }
    CHECK(found == 10);
}

TEST_CASE("qsdp: model bookkeeping")
{
    auto t = make_toy();
    SdrModel m(8, 2, 1);
    CHECK(m.dimension() == 1 + 2 * 64);
    CHECK(m.block_offset(1) == 65);
    m.add_power_budget(1.0);
    m.add_sinr_constraints(t->channels, 10.0, 1e-3);
    m.add_gain_equality(t->geometry, 0.0, 5.0);
    CHECK(m.count("sinr") == 2);
    CHECK(m.count("power") == 1);
    CHECK(m.count("gain") == 1);

    std::mt19937_64 rng(23);
    const CMatrix C = random_psd(rng, 8, 2);
    const CMatrix R = random_psd(rng, 8, 3);
    RVector f = m.zero_form();
    m.add_block_term(f, 1, C);
    RVector v = RVector::Zero(m.dimension());
    v.segment(m.block_offset(1), 64) = hvec(R);
    CHECK(f.dot(v) == doctest::Approx((C * R).trace().real()).epsilon(1e-12));
}
