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

#include <cmath>
#include <span>

namespace isac {

/// Uniform linear array. Element m sits at m * element_spacing from the
/// first element (m = 0 is the phase reference).
struct ArrayGeometry {
    int num_antennas = 36;
    double element_spacing = 0.0; // meters
    double carrier_freq = 28e9;   // Hz

    double wavelength() const { return kSpeedOfLight / carrier_freq; }

    /// Geometry with d = lambda / 2 at the given carrier.
    static ArrayGeometry half_wavelength(int num_antennas, double carrier_freq = 28e9);

    /// Throws InvalidInputError unless M >= 1, d > 0 and f_c > 0.
    void validate() const;
};

enum class ArraySide { transmit, receive };

/// Steering vector with entries exp(j 2 pi (f_c + f_nu) m d sin(theta) / c).
///
/// Transmit and receive vectors coincide for the colocated array; the side
/// argument only documents intent at call sites.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>
steering_vector(const ArrayGeometry& geometry, Scalar doppler_hz, Scalar theta,
                ArraySide side = ArraySide::transmit)
{
    (void)side;
    if (!std::isfinite(static_cast<double>(theta)) || !std::isfinite(static_cast<double>(doppler_hz)))
        throw InvalidInputError("steering_vector: non-finite angle or Doppler");
    if (std::abs(static_cast<double>(theta)) > kPi / 2 + 1e-12)
        throw InvalidInputError("steering_vector: |theta| must not exceed pi/2");
    geometry.validate();

    const Scalar f = static_cast<Scalar>(geometry.carrier_freq) + doppler_hz;
    const Scalar step = Scalar(2) * static_cast<Scalar>(kPi) * f * static_cast<Scalar>(geometry.element_spacing) *
                        std::sin(theta) / static_cast<Scalar>(kSpeedOfLight);
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> b(geometry.num_antennas);
    for (int m = 0; m < geometry.num_antennas; ++m)
        b(m) = std::polar(Scalar(1), step * static_cast<Scalar>(m));
    return b;
}

/// Columns are transmit steering vectors at each angle (radians).
CMatrix steering_matrix(const ArrayGeometry& geometry, double doppler_hz, std::span<const double> angles);

/// Sum_k |b_T^H(f_nu, theta0) w_k|^2 in the units of |W|^2 (mW).
double target_gain(const CMatrix& W, const ArrayGeometry& geometry, double doppler_hz, double theta0);

/// b_T^H(theta) R_W b_T(theta) for each angle, zero Doppler.
RVector beampattern(const CMatrix& R_W, const ArrayGeometry& geometry, std::span<const double> angles);

} // namespace isac
