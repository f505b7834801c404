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
#include "isac/ambiguity.hpp"

using namespace isac;
using isac::testing::make_toy;
using isac::testing::random_beamformer;

namespace {

Complex brute_correlation(const CVector& a, const CVector& b, int lag)
{
    Complex acc(0.0, 0.0);
    const int N = static_cast<int>(a.size());
    for (int n = 0; n < N; ++n) {
        const int m = n - lag;
        if (m >= 0 && m < N) acc += a(n) * std::conj(b(m));
    }
    return acc;
}

// Sum over users of (b0^H w_k) X_ki(lag) (w_i^H b1), every term spelled out.
Complex brute_af(const CMatrix& W, const ArrayGeometry& g, const WaveformSet& w, double theta0, double theta1,
                 int lag)
{
    const int M = g.num_antennas;
    const double step = 2.0 * kPi * g.carrier_freq * g.element_spacing / kSpeedOfLight;
    auto b = [&](double th, int m) { return std::polar(1.0, step * m * std::sin(th)); };
    Complex acc(0.0, 0.0);
    for (int k = 0; k < W.cols(); ++k)
        for (int i = 0; i < W.cols(); ++i) {
            Complex left(0.0, 0.0), right(0.0, 0.0);
            for (int m = 0; m < M; ++m) {
                left += std::conj(b(theta0, m)) * W(m, k);
                right += std::conj(W(m, i)) * b(theta1, m);
            }
            acc += left * brute_correlation(w.sequences[k], w.sequences[i], lag) * right;
        }
    return acc;
}

std::vector<CMatrix> covariances_of(const CMatrix& W)
{
    std::vector<CMatrix> R;
    for (int k = 0; k < W.cols(); ++k) R.push_back(W.col(k) * W.col(k).adjoint());
    return R;
}

} // namespace

TEST_CASE("ambiguity: angle grid sampling")
{
    const AngleGrid omega = make_angle_grid({{-10.0, -5.0}, {5.0, 10.0}}, 0.1);
    CHECK(omega.size() == 102);
    CHECK(omega.angles.front() == doctest::Approx(deg_to_rad(-10.0)));
    CHECK(omega.angles.back() == doctest::Approx(deg_to_rad(10.0)));
    // The target angle itself is dropped.
    CHECK(make_angle_grid({{-1.0, 1.0}}, 0.5).size() == 4);
    CHECK_THROWS_AS(make_angle_grid({{-95.0, 0.0}}, 1.0), InvalidInputError);
}

TEST_CASE("ambiguity: AF value against a hand evaluation")
{
    auto t = make_toy();
    std::mt19937_64 rng(11);
    const CMatrix W = random_beamformer(rng, 8, 2);
    const double bin = t->corr.grid.bin_size_m();
    for (int lag : {0, 3, -7, 16}) {
        TargetParams p0, p1;
        p0.angle_rad = 0.1;
        p1.angle_rad = -0.4;
        p1.range_m = lag * bin;
        const Complex v = af_value(W, t->geometry, t->corr, p0, p1, false);
        const Complex ref = brute_af(W, t->geometry, t->waves, 0.1, -0.4, lag);
        CHECK(std::abs(std::abs(v) - std::abs(ref)) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("ambiguity: mainlobe equals P_s N plus cross terms, receive factor adds M")
{
    auto t = make_toy();
    std::mt19937_64 rng(12);
    const CMatrix W = random_beamformer(rng, 8, 2);
    TargetParams p0;
    const Complex off = af_value(W, t->geometry, t->corr, p0, p0, false);
    const Complex on = af_value(W, t->geometry, t->corr, p0, p0, true);
    const Complex ref = brute_af(W, t->geometry, t->waves, 0.0, 0.0, 0);
    CHECK(std::abs(off - ref) <= 1e-12 * std::abs(ref));
    CHECK(std::abs(on - 8.0 * off) <= 1e-12 * std::abs(on));

    // With the cross-blocks removed the mainlobe is exactly P_s N.
    const CorrelationMatrix diag = t->corr.without_cross_blocks();
    const Complex v = af_value(W, t->geometry, diag, p0, p0, false);
    CHECK(v.real() == doctest::Approx(target_gain(W, t->geometry, 0.0, 0.0) * 64.0).epsilon(1e-12));
    CHECK(std::abs(v.imag()) <= 1e-12 * v.real());
    CHECK(mainlobe_magnitude(W, t->geometry, diag, 0.0) == doctest::Approx(std::abs(v)).epsilon(1e-12));

    const CMatrix Z = CMatrix::Zero(8, 2);
    CHECK(std::abs(af_value(Z, t->geometry, t->corr, p0, p0, true)) == 0.0);
}

TEST_CASE("ambiguity: AF rejects off-grid offsets")
{
    auto t = make_toy();
    const CMatrix W = CMatrix::Ones(8, 2);
    TargetParams p0, p1;
    p1.range_m = 0.3 * t->corr.grid.bin_size_m();
    CHECK_THROWS_AS(af_value(W, t->geometry, t->corr, p0, p1, false), InvalidInputError);
    p1.range_m = 40.0 * t->corr.grid.bin_size_m();
    CHECK_THROWS_AS(af_value(W, t->geometry, t->corr, p0, p1, false), InvalidInputError);
    CHECK_THROWS_AS(af_value(CMatrix::Ones(7, 2), t->geometry, t->corr, p0, p0, false), DimensionError);
}

TEST_CASE("ambiguity: direct ISL against the brute-force sum")
{
    auto t = make_toy();
    std::mt19937_64 rng(13);
    const CMatrix W = random_beamformer(rng, 8, 2);
    double ref = 0.0;
    const auto& grid = t->corr.grid;
    for (double th : t->omega.angles)
        for (int li = 0; li < grid.num_lags(); ++li)
            if (t->mask.cells(li, 0) != 0.0) ref += std::norm(brute_af(W, t->geometry, t->waves, 0.0, th, grid.lags[li]));
    CHECK(isl_direct(W, t->geometry, t->corr, t->mask, 0.0, t->omega) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("ambiguity: vectorized ISL equals direct ISL without cross-blocks")
{
    auto t = make_toy();
    const CorrelationMatrix diag = t->corr.without_cross_blocks();
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 5; ++trial) {
        const CMatrix W = random_beamformer(rng, 8, 2);
        const double d = isl_direct(W, t->geometry, diag, t->mask, 0.0, t->omega);
        const double v = isl_vectorized(covariances_of(W), t->geometry, t->corr, t->mask, 0.0, t->omega);
        CHECK(std::abs(d - v) <= 1e-8 * d);
    }
}

TEST_CASE("ambiguity: cross-term gap stays within the computed bound")
{
    auto t = make_toy();
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 5; ++trial) {
        const CMatrix W = random_beamformer(rng, 8, 2);
        const double d = isl_direct(W, t->geometry, t->corr, t->mask, 0.0, t->omega);
        const double v = isl_vectorized(covariances_of(W), t->geometry, t->corr, t->mask, 0.0, t->omega);
        const double bound = cross_term_gap_bound(W, t->geometry, t->corr, t->mask, 0.0, t->omega);
        CHECK(std::abs(d - v) / v <= bound * (1.0 + 1e-12));
    }
}

TEST_CASE("ambiguity: degenerate inputs give zero ISL")
{
    auto t = make_toy();
    std::mt19937_64 rng(16);
    const CMatrix W = random_beamformer(rng, 8, 2);
    const SidelobeMask none = build_mask(t->corr.grid, {});
    CHECK(isl_direct(W, t->geometry, t->corr, none, 0.0, t->omega) == 0.0);
    CHECK(isl_vectorized(covariances_of(W), t->geometry, t->corr, none, 0.0, t->omega) == 0.0);
    CHECK(isl_direct(CMatrix::Zero(8, 2), t->geometry, t->corr, t->mask, 0.0, t->omega) == 0.0);
    const std::vector<CMatrix> zero(2, CMatrix::Zero(8, 8));
    CHECK(isl_vectorized(zero, t->geometry, t->corr, t->mask, 0.0, t->omega) == 0.0);
}

TEST_CASE("ambiguity: quadratic homogeneity")
{
    auto t = make_toy();
    std::mt19937_64 rng(17);
    const CMatrix W = random_beamformer(rng, 8, 2);
    auto R = covariances_of(W);
    const double v = isl_vectorized(R, t->geometry, t->corr, t->mask, 0.0, t->omega);
    for (auto& r : R) r *= 2.0;
    CHECK(isl_vectorized(R, t->geometry, t->corr, t->mask, 0.0, t->omega) == doctest::Approx(4.0 * v).epsilon(1e-13));
    const double d = isl_direct(W, t->geometry, t->corr, t->mask, 0.0, t->omega);
    CHECK(isl_direct(std::sqrt(2.0) * W, t->geometry, t->corr, t->mask, 0.0, t->omega) ==
          doctest::Approx(4.0 * d).epsilon(1e-13));
}

TEST_CASE("ambiguity: phase rotation invariance")
{
    auto t = make_toy();
    std::mt19937_64 rng(18);
    const CMatrix W = random_beamformer(rng, 8, 2);
    CMatrix Wc = W * std::polar(1.0, 1.234);
    CMatrix Wk = W;
    Wk.col(0) *= std::polar(1.0, 0.7);
    Wk.col(1) *= std::polar(1.0, -2.1);

    const double d = isl_direct(W, t->geometry, t->corr, t->mask, 0.0, t->omega);
    CHECK(isl_direct(Wc, t->geometry, t->corr, t->mask, 0.0, t->omega) == doctest::Approx(d).epsilon(1e-12));
    const double v = isl_vectorized(covariances_of(W), t->geometry, t->corr, t->mask, 0.0, t->omega);
    CHECK(isl_vectorized(covariances_of(Wk), t->geometry, t->corr, t->mask, 0.0, t->omega) ==
          doctest::Approx(v).epsilon(1e-12));
    CHECK(mainlobe_magnitude(Wc, t->geometry, t->corr, 0.0) ==
          doctest::Approx(mainlobe_magnitude(W, t->geometry, t->corr, 0.0)).epsilon(1e-12));
}

TEST_CASE("ambiguity: shrinking the mask or the angle set never raises the ISL")
{
    auto t = make_toy();
    std::mt19937_64 rng(19);
    const double bin = t->corr.grid.bin_size_m();
    const SidelobeMask inner = build_mask(t->corr.grid, {{-8.0 * bin, -2.0 * bin}, {2.0 * bin, 8.0 * bin}});
    const AngleGrid half = make_angle_grid({{5.0, 10.0}}, 0.5);
    for (int trial = 0; trial < 5; ++trial) {
        const CMatrix W = random_beamformer(rng, 8, 2);
        const auto R = covariances_of(W);
        const double full_d = isl_direct(W, t->geometry, t->corr, t->mask, 0.0, t->omega);
        const double full_v = isl_vectorized(R, t->geometry, t->corr, t->mask, 0.0, t->omega);
        CHECK(isl_direct(W, t->geometry, t->corr, inner, 0.0, t->omega) <= full_d);
        CHECK(isl_vectorized(R, t->geometry, t->corr, inner, 0.0, t->omega) <= full_v);
        CHECK(isl_direct(W, t->geometry, t->corr, t->mask, 0.0, half) <= full_d);
        CHECK(isl_vectorized(R, t->geometry, t->corr, t->mask, 0.0, half) <= full_v);
    }
}

TEST_CASE("ambiguity: vectorized ISL rejects non-Hermitian input")
{
    auto t = make_toy();
    std::vector<CMatrix> R(2, CMatrix::Zero(8, 8));
    R[0](0, 1) = Complex(1.0, 0.0);
    CHECK_THROWS_AS(isl_vectorized(R, t->geometry, t->corr, t->mask, 0.0, t->omega), InvalidInputError);
    R.pop_back();
    CHECK_THROWS_AS(isl_vectorized(R, t->geometry, t->corr, t->mask, 0.0, t->omega), DimensionError);
}

TEST_CASE("ambiguity: ISLR conventions")
{
    CHECK(islr_db(9.0, 3.0) == doctest::Approx(0.0));
    CHECK(islr_db(0.0, 3.0) == kDbFloor);
    CHECK(islr_db(0.09, 3.0) == doctest::Approx(-20.0));
    CHECK_THROWS_AS(islr_db(1.0, 0.0), InvalidInputError);
}

TEST_CASE("ambiguity: narrowband criterion")
{
    const WaveformSet w = make_zadoff_chu_waveforms({1, 3, 5}, 512, 10e6);
    NarrowbandCheck c = narrowband_check(w, 0.0);
    CHECK(c.satisfied);
    CHECK(c.criterion == 0.0);
    c = narrowband_check(w, 30.0);
    CHECK(c.satisfied);
    CHECK(c.criterion == doctest::Approx(2.0 * 30.0 * 512.0 / kSpeedOfLight).epsilon(1e-12));
    CHECK(c.criterion == doctest::Approx(1.02e-4).epsilon(0.01));
    CHECK_FALSE(narrowband_check(w, 3e6).satisfied);
}
