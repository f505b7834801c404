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

#include "isac/array.hpp"

namespace isac {

ArrayGeometry ArrayGeometry::half_wavelength(int num_antennas, double carrier_freq)
{
    ArrayGeometry g;
    g.num_antennas = num_antennas;
    g.carrier_freq = carrier_freq;
    g.element_spacing = g.wavelength() / 2.0;
    g.validate();
    return g;
}

void ArrayGeometry::validate() const
{
    if (num_antennas < 1) throw InvalidInputError("ArrayGeometry: need at least one antenna");
    if (!(element_spacing > 0.0)) throw InvalidInputError("ArrayGeometry: element spacing must be positive");
    if (!(carrier_freq > 0.0)) throw InvalidInputError("ArrayGeometry: carrier frequency must be positive");
}

CMatrix steering_matrix(const ArrayGeometry& geometry, double doppler_hz, std::span<const double> angles)
{
    CMatrix B(geometry.num_antennas, static_cast<Eigen::Index>(angles.size()));
    for (std::size_t p = 0; p < angles.size(); ++p)
        B.col(static_cast<Eigen::Index>(p)) = steering_vector(geometry, doppler_hz, angles[p]);
    return B;
}

double target_gain(const CMatrix& W, const ArrayGeometry& geometry, double doppler_hz, double theta0)
{
    if (W.rows() != geometry.num_antennas)
        throw DimensionError("target_gain: W must have one row per antenna");
    const CVector b = steering_vector(geometry, doppler_hz, theta0);
    return (b.adjoint() * W).squaredNorm();
}

RVector beampattern(const CMatrix& R_W, const ArrayGeometry& geometry, std::span<const double> angles)
{
    if (R_W.rows() != geometry.num_antennas || R_W.cols() != geometry.num_antennas)
        throw DimensionError("beampattern: R_W must be M x M");
    RVector out(static_cast<Eigen::Index>(angles.size()));
    for (std::size_t p = 0; p < angles.size(); ++p) {
        const CVector b = steering_vector(geometry, 0.0, angles[p]);
        out(static_cast<Eigen::Index>(p)) = (b.adjoint() * R_W * b)(0).real();
    }
    return out;
}

} // namespace isac
