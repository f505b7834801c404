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

#include "isac/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace isac {

namespace {

int zero_doppler_index(const CorrelationMatrix& corr)
{
    const int d = corr.grid.doppler_index(0.0);
    if (d < 0) throw InvalidInputError("correlation grid has no zero-Doppler bin");
    return d;
}

void check_mask(const CorrelationMatrix& corr, const SidelobeMask& mask)
{
    if (mask.cells.rows() != corr.grid.num_lags() || mask.cells.cols() != corr.grid.num_doppler())
        throw DimensionError("sidelobe mask does not match the correlation grid");
}

void check_beamformer(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr)
{
    if (W.rows() != geometry.num_antennas || W.cols() != corr.num_users)
        throw DimensionError("beamformer must be M x K for the given geometry and waveform set");
}

} // namespace

AngleGrid make_angle_grid(const std::vector<std::pair<double, double>>& intervals_deg, double step_deg,
                          double target_deg)
{
    if (!(step_deg > 0.0)) throw InvalidInputError("angle grid: step must be positive");
    AngleGrid grid;
    for (const auto& [lo, hi] : intervals_deg) {
        if (lo > hi) throw InvalidInputError("angle grid: interval lower bound exceeds upper bound");
        if (lo <= -90.0 || hi >= 90.0) throw InvalidInputError("angle grid: angles must lie in (-90, 90) degrees");
        const int n = static_cast<int>(std::floor((hi - lo) / step_deg + 1e-9));
        for (int i = 0; i <= n; ++i) {
            const double deg = lo + i * step_deg;
            if (std::abs(deg - target_deg) < step_deg / 2) continue;
            grid.angles.push_back(deg_to_rad(deg));
        }
    }
    std::sort(grid.angles.begin(), grid.angles.end());
    grid.angles.erase(std::unique(grid.angles.begin(), grid.angles.end(),
                                  [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                      grid.angles.end());
    return grid;
}

std::vector<double> uniform_angles_rad(double lo_deg, double hi_deg, double step_deg)
{
    if (!(step_deg > 0.0) || lo_deg > hi_deg) throw InvalidInputError("uniform_angles_rad: bad range");
    std::vector<double> out;
    const int n = static_cast<int>(std::floor((hi_deg - lo_deg) / step_deg + 1e-9));
    for (int i = 0; i <= n; ++i) out.push_back(deg_to_rad(lo_deg + i * step_deg));
    return out;
}

Complex af_at_lag(const CVector& upsilon0, const CVector& upsilon1, const CorrelationMatrix& corr, int lag_index,
                  int doppler_index, Complex receive_factor)
{
    Complex acc(0.0, 0.0);
    for (int k = 0; k < corr.num_users; ++k) {
        const Complex left = std::conj(upsilon0(k));
        if (left == Complex(0.0, 0.0)) continue;
        for (int i = 0; i < corr.num_users; ++i)
            acc += left * corr.block(k, i)(lag_index, doppler_index) * upsilon1(i);
    }
    return receive_factor * acc;
}

Complex af_value(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr,
                 const TargetParams& theta0, const TargetParams& theta1, bool include_receive_factor)
{
    check_beamformer(W, geometry, corr);
    const double bin = corr.grid.bin_size_m();
    const double lag_real = (theta1.range_m - theta0.range_m) / bin;
    const double lag_rounded = std::round(lag_real);
    if (std::abs(lag_real - lag_rounded) > 1e-6)
        throw InvalidInputError("af_value: range offset is not on the lag grid");
    const int li = corr.grid.lag_index(static_cast<int>(lag_rounded));
    const double fd0 = theta0.doppler_hz(geometry);
    const double fd1 = theta1.doppler_hz(geometry);
    const int di = corr.grid.doppler_index(fd1 - fd0);
    if (li < 0 || di < 0) throw InvalidInputError("af_value: (range, Doppler) offset outside the correlation grid");

    const CVector b0 = steering_vector(geometry, fd0, theta0.angle_rad);
    const CVector b1 = steering_vector(geometry, fd1, theta1.angle_rad);
    Complex xi(1.0, 0.0);
    if (include_receive_factor) {
        const CVector r0 = steering_vector(geometry, fd0, theta0.angle_rad, ArraySide::receive);
        const CVector r1 = steering_vector(geometry, fd1, theta1.angle_rad, ArraySide::receive);
        xi = r0.dot(r1); // Eigen's dot conjugates the first argument
    }
    const double fc = geometry.carrier_freq;
    const Complex phi = std::polar(1.0, -2.0 * kPi * (fc + fd0) * theta0.delay_s()) *
                        std::polar(1.0, -2.0 * kPi * (fc + fd1) * theta1.delay_s());
    const CVector ups0 = W.adjoint() * b0;
    const CVector ups1 = W.adjoint() * b1;
    return af_at_lag(ups0, ups1, corr, li, di, xi) * phi;
}

double isl_direct(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr,
                  const SidelobeMask& mask, double theta0, const AngleGrid& omega)
{
    check_beamformer(W, geometry, corr);
    check_mask(corr, mask);
    const int d0 = zero_doppler_index(corr);
    const CVector ups0 = W.adjoint() * steering_vector(geometry, 0.0, theta0);
    std::vector<int> lags;
    for (int li = 0; li < corr.grid.num_lags(); ++li)
        if (mask.cells(li, d0) != 0.0) lags.push_back(li);

    double isl = 0.0;
    for (double theta1 : omega.angles) {
        const CVector ups1 = W.adjoint() * steering_vector(geometry, 0.0, theta1);
        for (int li : lags) isl += std::norm(af_at_lag(ups0, ups1, corr, li, d0));
    }
    return isl;
}

CVector masked_autocorrelation(const CorrelationMatrix& corr, const SidelobeMask& mask, int k)
{
    check_mask(corr, mask);
    const int d0 = zero_doppler_index(corr);
    return corr.block(k, k).col(d0).cwiseProduct(mask.cells.col(d0).cast<Complex>());
}

double isl_vectorized(const std::vector<CMatrix>& covariances, const ArrayGeometry& geometry,
                      const CorrelationMatrix& corr, const SidelobeMask& mask, double theta0,
                      const AngleGrid& omega)
{
    check_mask(corr, mask);
    const int M = geometry.num_antennas;
    if (static_cast<int>(covariances.size()) != corr.num_users)
        throw DimensionError("isl_vectorized: need one covariance per user");
    for (const auto& R : covariances) {
        if (R.rows() != M || R.cols() != M) throw DimensionError("isl_vectorized: covariances must be M x M");
        const double scale = std::max(1.0, R.cwiseAbs().maxCoeff());
        if ((R - R.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
            throw InvalidInputError("isl_vectorized: covariance is not Hermitian");
    }
    if (omega.empty()) return 0.0;

    const CVector b0 = steering_vector(geometry, 0.0, theta0);
    const CMatrix B = steering_matrix(geometry, 0.0, omega.angles);
    CMatrix Z = CMatrix::Zero(omega.size(), corr.grid.num_lags());
    for (int k = 0; k < corr.num_users; ++k) {
        const CVector a = (b0.adjoint() * covariances[static_cast<std::size_t>(k)] * B).transpose();
        Z += a * masked_autocorrelation(corr, mask, k).transpose();
    }
    return Z.squaredNorm();
}

double cross_term_gap_bound(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr,
                            const SidelobeMask& mask, double theta0, const AngleGrid& omega)
{
    check_beamformer(W, geometry, corr);
    check_mask(corr, mask);
    const int d0 = zero_doppler_index(corr);
    const double ps = target_gain(W, geometry, 0.0, theta0);
    const CMatrix B = steering_matrix(geometry, 0.0, omega.angles);
    const double leak = (W.adjoint() * B).squaredNorm();
    double cross = 0.0;
    for (int k = 0; k < corr.num_users; ++k)
        for (int i = 0; i < corr.num_users; ++i)
            if (k != i) cross += corr.block(k, i).col(d0).cwiseAbs2().cwiseProduct(mask.cells.col(d0)).sum();
    const double eps = std::sqrt(ps * leak * cross);

    std::vector<CMatrix> covs;
    for (int k = 0; k < W.cols(); ++k) covs.push_back(W.col(k) * W.col(k).adjoint());
    const double v = std::sqrt(isl_vectorized(covs, geometry, corr, mask, theta0, omega));
    if (v == 0.0) return eps == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return 2.0 * eps / v + (eps / v) * (eps / v);
}

double mainlobe_magnitude(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr,
                          double theta0)
{
    check_beamformer(W, geometry, corr);
    const int l0 = corr.grid.lag_index(0);
    if (l0 < 0) throw InvalidInputError("mainlobe_magnitude: grid has no zero lag");
    const CVector ups0 = W.adjoint() * steering_vector(geometry, 0.0, theta0);
    return std::abs(af_at_lag(ups0, ups0, corr, l0, zero_doppler_index(corr)));
}

double islr_db(double isl, double mainlobe)
{
    if (!(mainlobe > 0.0)) throw InvalidInputError("islr: mainlobe is zero (degenerate beamformer)");
    if (isl <= 0.0) return kDbFloor;
    return linear_to_db(isl / (mainlobe * mainlobe));
}

double islr_db(double isl, const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr,
               double theta0)
{
    return islr_db(isl, mainlobe_magnitude(W, geometry, corr, theta0));
}

NarrowbandCheck narrowband_check(const WaveformSet& waves, double max_velocity_mps, double threshold)
{
    NarrowbandCheck out;
    const double bandwidth = waves.sample_rate;
    out.criterion = 2.0 * std::abs(max_velocity_mps) * bandwidth * waves.duration() / kSpeedOfLight;
    out.satisfied = out.criterion < threshold;
    return out;
}

} // namespace isac
