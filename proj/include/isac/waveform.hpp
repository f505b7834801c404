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
#include <utility>
#include <vector>

namespace isac {

/// Zadoff-Chu sequence: exp(-j pi u n^2 / N) for even N, exp(-j pi u n (n+1) / N) for odd N.
/// Throws InvalidInputError when gcd(u, N) != 1.
CVector zadoff_chu(int root, int length);

/// One baseband probing sequence per user, all of equal length.
struct WaveformSet {
    std::vector<CVector> sequences;
    double sample_rate = 10e6; // Hz

    int num_users() const { return static_cast<int>(sequences.size()); }
    int length() const { return sequences.empty() ? 0 : static_cast<int>(sequences.front().size()); }
    double energy(int k) const { return sequences[static_cast<std::size_t>(k)].squaredNorm(); }
    double duration() const { return length() / sample_rate; }
};

/// Zadoff-Chu waveforms with pairwise distinct roots.
WaveformSet make_zadoff_chu_waveforms(const std::vector<int>& roots, int length, double sample_rate);

/// Reads one sequence from a two-column (real, imag) CSV, samples in row order.
CVector read_sequence_csv(const std::string& path);

/// Lag/Doppler sampling of the correlation matrix. A lag of l bins is a
/// range offset of l * c / (2 f_s) meters.
struct RangeDopplerGrid {
    std::vector<int> lags;            // symmetric, contains 0
    std::vector<double> doppler_hz;   // contains 0 by default
    double sample_rate = 10e6;

    double bin_size_m() const { return kSpeedOfLight / (2.0 * sample_rate); }
    int num_lags() const { return static_cast<int>(lags.size()); }
    int num_doppler() const { return static_cast<int>(doppler_hz.size()); }
    int max_lag() const;
    int lag_index(int lag) const;            // -1 when absent
    int doppler_index(double hz) const;      // -1 when absent

    /// Lags -max_lag..max_lag, Doppler {0}.
    static RangeDopplerGrid symmetric(int max_lag, double sample_rate);
};

/// K x K blocks, block (k, i) holding X_ki at every (lag, Doppler) cell as an
/// L_r x L_d matrix (one column per Doppler bin).
struct CorrelationMatrix {
    RangeDopplerGrid grid;
    int num_users = 0;
    std::vector<CMatrix> blocks; // row-major over (k, i)

    const CMatrix& block(int k, int i) const { return blocks[static_cast<std::size_t>(k * num_users + i)]; }
    CMatrix& block(int k, int i) { return blocks[static_cast<std::size_t>(k * num_users + i)]; }

    /// K x K matrix X(lag, doppler) at grid indices.
    CMatrix at(int lag_index, int doppler_index) const;

    /// Copy with every off-diagonal block set to zero.
    CorrelationMatrix without_cross_blocks() const;
};

enum class CorrelationMode { aperiodic, periodic };

/// X_ki(l, nu) = sum_n s_k[n] conj(s_i[n - l]) exp(j 2 pi nu n / f_s).
/// Aperiodic mode zero-pads; periodic mode wraps n - l modulo N.
CorrelationMatrix build_correlation_matrix(const WaveformSet& waves, const RangeDopplerGrid& grid,
                                           CorrelationMode mode = CorrelationMode::aperiodic);

/// Scalar correlation of two sequences at a single lag and Doppler.
Complex correlate(const CVector& a, const CVector& b, int lag, double doppler_hz, double sample_rate,
                  CorrelationMode mode);

/// 0/1 selection over the (lag, Doppler) cells of a grid; identical for every block.
struct SidelobeMask {
    RMatrix cells; // L_r x L_d

    int count() const { return static_cast<int>(cells.sum()); }
};

using RangeInterval = std::pair<double, double>; // meters, closed

/// A cell is retained when its range offset l * bin lies in one of the closed
/// intervals. Throws InvalidInputError for intervals reaching past the lag window.
SidelobeMask build_mask(const RangeDopplerGrid& grid, const std::vector<RangeInterval>& region);

/// Smallest symmetric lag window covering every interval.
int lag_window_for(const std::vector<RangeInterval>& region, double sample_rate);

/// max over masked cells of off-diagonal |X_ki| divided by max_k E_k.
double max_masked_cross_ratio(const CorrelationMatrix& corr, const SidelobeMask& mask);

} // namespace isac
