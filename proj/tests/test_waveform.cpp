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

#include "isac/waveform.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace isac;

namespace {

// Straight double loop over the defining sum, zero-padded.
Complex brute_correlation(const CVector& a, const CVector& b, int lag)
{
    Complex acc(0.0, 0.0);
    const int N = static_cast<int>(a.size());
    for (int n = 0; n < N; ++n) {
        const int m = n - lag;
        if (m < 0 || m >= N) continue;
        acc += a(n) * std::conj(b(m));
    }
    return acc;
}

} // namespace

TEST_CASE("waveform: Zadoff-Chu root 1 length 4")
{
    const CVector z = zadoff_chu(1, 4);
    const Complex j(0.0, 1.0);
    const Complex expected[4] = {1.0, std::exp(-j * kPi / 4.0), std::exp(-j * kPi), std::exp(-j * 9.0 * kPi / 4.0)};
    for (int n = 0; n < 4; ++n) CHECK(std::abs(z(n) - expected[n]) < 1e-14);
}

TEST_CASE("waveform: Zadoff-Chu unit modulus and energy")
{
    const CVector z = zadoff_chu(1, 512);
    for (int n = 0; n < 512; ++n) CHECK(std::abs(std::abs(z(n)) - 1.0) < 1e-14);
    CHECK(z.squaredNorm() == doctest::Approx(512.0).epsilon(1e-13));
    CHECK_THROWS_AS(zadoff_chu(2, 512), InvalidInputError);
    CHECK_THROWS_AS(zadoff_chu(1, 0), InvalidInputError);
}

TEST_CASE("waveform: Zadoff-Chu periodic autocorrelation vanishes off zero lag")
{
    for (auto [u, N] : {std::pair{1, 512}, {3, 512}, {5, 512}, {2, 63}, {2, 31}, {1, 64}}) {
        const CVector z = zadoff_chu(u, N);
        double worst = 0.0;
        for (int l = 1; l < N; ++l)
            worst = std::max(worst, std::abs(correlate(z, z, l, 0.0, 10e6, CorrelationMode::periodic)));
        CHECK(worst <= 1e-10 * N);
    }
}

TEST_CASE("waveform: correlation matrix matches a brute-force oracle")
{
    const WaveformSet w = make_zadoff_chu_waveforms({1, 3}, 512, 10e6);
    const RangeDopplerGrid grid = RangeDopplerGrid::symmetric(120, 10e6);
    const CorrelationMatrix X = build_correlation_matrix(w, grid);
    REQUIRE(X.num_users == 2);
    const int zl = grid.lag_index(0);
    CHECK(std::abs(X.block(0, 0)(zl, 0) - Complex(512.0, 0.0)) < 1e-9);
    CHECK(std::abs(X.block(1, 1)(zl, 0) - Complex(512.0, 0.0)) < 1e-9);
    double err = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int li = 0; li < grid.num_lags(); ++li) {
                const Complex ref = brute_correlation(w.sequences[k], w.sequences[i], grid.lags[li]);
                err = std::max(err, std::abs(X.block(k, i)(li, 0) - ref));
            }
    CHECK(err <= 1e-12 * 512);
}

TEST_CASE("waveform: Zadoff-Chu cross-correlation stays near sqrt(N)")
{
    const int N = 512;
    const CVector a = zadoff_chu(1, N), b = zadoff_chu(3, N);
    double periodic = 0.0, aperiodic = 0.0;
    for (int l = -(N - 1); l < N; ++l) {
        periodic = std::max(periodic, std::abs(correlate(a, b, l, 0.0, 10e6, CorrelationMode::periodic)));
        aperiodic = std::max(aperiodic, std::abs(correlate(a, b, l, 0.0, 10e6, CorrelationMode::aperiodic)));
    }
    // gcd(3 - 1, 512) = 2, so the periodic peak is sqrt(2 N).
    CHECK(periodic <= std::sqrt(2.0 * N) * (1.0 + 1e-9));
    CHECK(aperiodic <= 2.0 * std::sqrt(double(N)));
}

TEST_CASE("waveform: conjugate-lag symmetry and Cauchy-Schwarz")
{
    const WaveformSet w = make_zadoff_chu_waveforms({1, 3, 5}, 512, 10e6);
    RangeDopplerGrid grid = RangeDopplerGrid::symmetric(106, 10e6);
    grid.doppler_hz = {-2000.0, 0.0, 2000.0};
    const CorrelationMatrix X = build_correlation_matrix(w, grid);
    const int zd = grid.doppler_index(0.0);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i) {
            double sym = 0.0;
            for (int li = 0; li < grid.num_lags(); ++li) {
                const int mirror = grid.lag_index(-grid.lags[li]);
                sym = std::max(sym, std::abs(X.block(k, i)(li, zd) - std::conj(X.block(i, k)(mirror, zd))));
            }
            CHECK(sym <= 1e-12 * 512);
            const double bound = std::sqrt(w.energy(k) * w.energy(i)) * (1.0 + 1e-12);
            CHECK(X.block(k, i).cwiseAbs().maxCoeff() <= bound);
        }
}

TEST_CASE("waveform: correlation rejects lags past the sequence")
{
    const WaveformSet w = make_zadoff_chu_waveforms({1, 3}, 16, 10e6);
    CHECK_THROWS_AS(build_correlation_matrix(w, RangeDopplerGrid::symmetric(16, 10e6)), InvalidInputError);
    CHECK_THROWS_AS(make_zadoff_chu_waveforms({1, 1}, 16, 10e6), InvalidInputError);
}

TEST_CASE("waveform: mask counts for the reference region")
{
    const std::vector<RangeInterval> region{{-1590.0, -90.0}, {90.0, 1590.0}};
    const int window = lag_window_for(region, 10e6);
    CHECK(window == 107);
    const RangeDopplerGrid grid = RangeDopplerGrid::symmetric(window, 10e6);
    const SidelobeMask mask = build_mask(grid, region);
    CHECK(mask.count() == 200);
    // Bins k with 90 <= k * 14.9896 <= 1590 are 7..106.
    CHECK(mask.cells(grid.lag_index(6), 0) == 0.0);
    CHECK(mask.cells(grid.lag_index(7), 0) == 1.0);
    CHECK(mask.cells(grid.lag_index(-106), 0) == 1.0);
    CHECK(mask.cells(grid.lag_index(107), 0) == 0.0);
}

TEST_CASE("waveform: empty and full masks")
{
    const RangeDopplerGrid grid = RangeDopplerGrid::symmetric(10, 10e6);
    CHECK(build_mask(grid, {}).count() == 0);
    const double bin = grid.bin_size_m();
    const SidelobeMask full = build_mask(grid, {{-10.0 * bin, -0.5 * bin}, {0.5 * bin, 10.0 * bin}});
    CHECK(full.count() == 20);
    CHECK(full.cells(grid.lag_index(0), 0) == 0.0);
    CHECK_THROWS_AS(build_mask(grid, {{0.0, 11.0 * bin}}), InvalidInputError);
}

TEST_CASE("waveform: sequence CSV import")
{
    const auto path = std::filesystem::temp_directory_path() / "isac_seq_test.csv";
    {
        std::ofstream f(path);
        f << "1,0\n0,-1\n-0.5,0.25\n";
    }
    const CVector s = read_sequence_csv(path.string());
    REQUIRE(s.size() == 3);
    CHECK(s(1) == Complex(0.0, -1.0));
    CHECK(s(2) == Complex(-0.5, 0.25));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_sequence_csv(path.string()), InvalidInputError);
}
