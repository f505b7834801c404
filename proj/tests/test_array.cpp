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

#include "isac/array.hpp"

#include <vector>

using namespace isac;

TEST_CASE("array: broadside steering vector is all ones")
{
    const ArrayGeometry g = ArrayGeometry::half_wavelength(4);
    const CVector b = steering_vector(g, 0.0, 0.0);
    REQUIRE(b.size() == 4);
    for (int m = 0; m < 4; ++m) CHECK(std::abs(b(m) - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("array: half-wavelength ULA at 30 degrees steps by pi/2")
{
    const ArrayGeometry g = ArrayGeometry::half_wavelength(4);
    const CVector b = steering_vector(g, 0.0, kPi / 6.0);
    const Complex expected[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int m = 0; m < 4; ++m) CHECK(std::abs(b(m) - expected[m]) < 1e-12);
}

TEST_CASE("array: steering norm is sqrt(M)")
{
    const ArrayGeometry g = ArrayGeometry::half_wavelength(36);
    CHECK(steering_vector(g, 0.0, 0.0).norm() == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(steering_vector(g, 0.0, 0.7).norm() == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("array: invalid inputs are rejected")
{
    const ArrayGeometry g = ArrayGeometry::half_wavelength(4);
    CHECK_THROWS_AS(steering_vector(g, 0.0, 1.6), InvalidInputError);
    CHECK_THROWS_AS(steering_vector(g, 0.0, std::nan("")), InvalidInputError);
    ArrayGeometry bad = g;
    bad.num_antennas = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidInputError);
    bad = g;
    bad.element_spacing = -1.0;
    CHECK_THROWS_AS(steering_vector(bad, 0.0, 0.0), InvalidInputError);
}

TEST_CASE("array: target gain of a matched beamformer is P*M")
{
    const ArrayGeometry g = ArrayGeometry::half_wavelength(36);
    const double P = 0.7;
    const CVector b = steering_vector(g, 0.0, 0.2);
    CMatrix W = b * std::sqrt(P / 36.0);
    CHECK(target_gain(W, g, 0.0, 0.2) == doctest::Approx(P * 36.0).epsilon(1e-12));
    CHECK(target_gain(CMatrix::Zero(36, 3), g, 0.0, 0.2) == 0.0);
}

TEST_CASE("array: isotropic covariance gives a flat pattern")
{
    const ArrayGeometry g = ArrayGeometry::half_wavelength(8);
    const double P = 2.5;
    const CMatrix R = CMatrix::Identity(8, 8) * (P / 8.0);
    const std::vector<double> angles{-1.2, -0.3, 0.0, 0.4, 1.5};
    const RVector p = beampattern(R, g, angles);
    for (int i = 0; i < p.size(); ++i) CHECK(p(i) == doctest::Approx(P).epsilon(1e-12));
}

TEST_CASE("array: coherent covariance peaks at M^2")
{
    const ArrayGeometry g = ArrayGeometry::half_wavelength(8);
    const CVector b = steering_vector(g, 0.0, 0.3);
    const std::vector<double> angles{0.3};
    CHECK(beampattern(b * b.adjoint(), g, angles)(0) == doctest::Approx(64.0).epsilon(1e-12));
}

TEST_CASE("array: half-power beamwidth of a 36-element broadside beam")
{
    const int M = 36;
    const ArrayGeometry g = ArrayGeometry::half_wavelength(M);
    const CVector b = steering_vector(g, 0.0, 0.0);
    const CMatrix R = b * b.adjoint();
    const double peak = double(M) * M;

    // Bisection for the half-power point on the positive side.
    double lo = 0.0, hi = 0.1;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const std::vector<double> a{mid};
        if (beampattern(R, g, a)(0) > 0.5 * peak) lo = mid;
        else hi = mid;
    }
    const double hpbw = 2.0 * lo;
    const double approx = 0.886 * g.wavelength() / (M * g.element_spacing);
    CHECK(hpbw == doctest::Approx(approx).epsilon(0.01));
    CHECK(rad_to_deg(hpbw) == doctest::Approx(2.82).epsilon(0.01));
}
