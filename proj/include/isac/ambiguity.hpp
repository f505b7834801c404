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

#include "isac/array.hpp"
#include "isac/waveform.hpp"

#include <vector>

namespace isac {

/// Target hypothesis (range, radial velocity, angle).
struct TargetParams {
    double range_m = 0.0;
    double velocity_mps = 0.0;
    double angle_rad = 0.0;

    double doppler_hz(const ArrayGeometry& geometry) const { return 2.0 * velocity_mps / geometry.wavelength(); }
    double delay_s() const { return 2.0 * range_m / kSpeedOfLight; }
};

/// Sorted sidelobe angles in radians.
struct AngleGrid {
    std::vector<double> angles;

    int size() const { return static_cast<int>(angles.size()); }
    bool empty() const { return angles.empty(); }
};

/// Samples each closed interval [lo, hi] (degrees) at the given step and drops
/// any sample within half a step of the target angle.
AngleGrid make_angle_grid(const std::vector<std::pair<double, double>>& intervals_deg, double step_deg,
                          double target_deg = 0.0);

/// Uniform display grid over [lo, hi] degrees inclusive.
std::vector<double> uniform_angles_rad(double lo_deg, double hi_deg, double step_deg);

/// Range-angle-Doppler AF of the beamformed transmission:
///   xi * (b_T^H(Theta0) W) X(dr, dfd) (W^H b_T(Theta1)) * phi
/// with xi = b_R^H(Theta0) b_R(Theta1) when include_receive_factor, else 1.
/// (dr, dfd) must fall exactly on the correlation grid.
Complex af_value(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr,
                 const TargetParams& theta0, const TargetParams& theta1, bool include_receive_factor);

/// Zero-Doppler AF at grid lag index without the unit-modulus range phase.
Complex af_at_lag(const CVector& upsilon0, const CVector& upsilon1, const CorrelationMatrix& corr, int lag_index,
                  int doppler_index, Complex receive_factor = Complex(1.0, 0.0));

/// Sum over theta1 in Omega and masked lags of |chi(theta0, theta1, dr, 0)|^2,
/// receive factor omitted. Uses every block of the correlation matrix.
double isl_direct(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr,
                  const SidelobeMask& mask, double theta0, const AngleGrid& omega);

/// || sum_k vec(b0^H R_k B_Omega) vec(mask .* X_kk)^T ||_F^2 : the ISL with
/// cross-blocks neglected, as a function of the covariances R_k.
double isl_vectorized(const std::vector<CMatrix>& covariances, const ArrayGeometry& geometry,
                      const CorrelationMatrix& corr, const SidelobeMask& mask, double theta0,
                      const AngleGrid& omega);

/// Masked zero-Doppler autocorrelation of user k (length L_r).
CVector masked_autocorrelation(const CorrelationMatrix& corr, const SidelobeMask& mask, int k);

/// Upper bound on |isl_direct - isl_vectorized| / isl_vectorized for rank-one
/// covariances R_k = w_k w_k^H, from the masked cross-block energy.
double cross_term_gap_bound(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr,
                            const SidelobeMask& mask, double theta0, const AngleGrid& omega);

/// |chi(theta0, theta0, 0, 0)| with the receive factor omitted.
double mainlobe_magnitude(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr,
                          double theta0);

/// 10 log10(isl / mainlobe^2); isl == 0 maps to kDbFloor.
double islr_db(double isl, double mainlobe);
double islr_db(double isl, const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr,
               double theta0);

struct NarrowbandCheck {
    bool satisfied = true;
    double criterion = 0.0; // 2 v B T / c
};

/// Narrowband test 2 v_max B T / c << 1 with B = f_s, T = N / f_s, threshold 0.01.
NarrowbandCheck narrowband_check(const WaveformSet& waves, double max_velocity_mps, double threshold = 0.01);

} // namespace isac
