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

#include "isac/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace isac {

CVector zadoff_chu(int root, int length)
{
    if (length < 1) throw InvalidInputError("zadoff_chu: length must be positive");
    if (std::gcd(root, length) != 1) throw InvalidInputError("zadoff_chu: root must be coprime with length");
    CVector x(length);
    const bool even = length % 2 == 0;
    for (int n = 0; n < length; ++n) {
        // Reduce the exponent modulo 2N to keep the phase argument small.
        const long long nn = static_cast<long long>(n);
        const long long q = even ? nn * nn : nn * (nn + 1);
        const long long r = (static_cast<long long>(root) % (2LL * length) * (q % (2LL * length))) % (2LL * length);
        x(n) = std::polar(1.0, -kPi * static_cast<double>(r) / length);
    }
    return x;
}

WaveformSet make_zadoff_chu_waveforms(const std::vector<int>& roots, int length, double sample_rate)
{
    if (!(sample_rate > 0.0)) throw InvalidInputError("waveforms: sample rate must be positive");
    std::set<int> seen;
    WaveformSet w;
    w.sample_rate = sample_rate;
    for (int u : roots) {
        if (!seen.insert(((u % length) + length) % length).second)
            throw InvalidInputError("waveforms: Zadoff-Chu roots must be pairwise distinct");
        w.sequences.push_back(zadoff_chu(u, length));
    }
    return w;
}

CVector read_sequence_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInputError("read_sequence_csv: cannot open " + path);
    std::vector<Complex> samples;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double re = 0.0, im = 0.0;
        if (!(ss >> re >> im)) {
            if (lineno == 1) continue; // header row
            throw InvalidInputError("read_sequence_csv: malformed row " + std::to_string(lineno) + " in " + path);
        }
        samples.emplace_back(re, im);
    }
    if (samples.empty()) throw InvalidInputError("read_sequence_csv: no samples in " + path);
    return Eigen::Map<CVector>(samples.data(), static_cast<Eigen::Index>(samples.size()));
}

int RangeDopplerGrid::max_lag() const
{
    int m = 0;
    for (int l : lags) m = std::max(m, std::abs(l));
    return m;
}

int RangeDopplerGrid::lag_index(int lag) const
{
    const auto it = std::find(lags.begin(), lags.end(), lag);
    return it == lags.end() ? -1 : static_cast<int>(it - lags.begin());
}

int RangeDopplerGrid::doppler_index(double hz) const
{
    for (std::size_t i = 0; i < doppler_hz.size(); ++i)
        if (std::abs(doppler_hz[i] - hz) <= 1e-9 * std::max(1.0, std::abs(hz))) return static_cast<int>(i);
    return -1;
}

RangeDopplerGrid RangeDopplerGrid::symmetric(int max_lag, double sample_rate)
{
    if (max_lag < 0) throw InvalidInputError("RangeDopplerGrid: max_lag must be non-negative");
    RangeDopplerGrid g;
    g.sample_rate = sample_rate;
    for (int l = -max_lag; l <= max_lag; ++l) g.lags.push_back(l);
    g.doppler_hz = {0.0};
    return g;
}

CMatrix CorrelationMatrix::at(int lag_index, int doppler_index) const
{
    CMatrix X(num_users, num_users);
    for (int k = 0; k < num_users; ++k)
        for (int i = 0; i < num_users; ++i) X(k, i) = block(k, i)(lag_index, doppler_index);
    return X;
}

CorrelationMatrix CorrelationMatrix::without_cross_blocks() const
{
    CorrelationMatrix out = *this;
    for (int k = 0; k < num_users; ++k)
        for (int i = 0; i < num_users; ++i)
            if (k != i) out.block(k, i).setZero();
    return out;
}

Complex correlate(const CVector& a, const CVector& b, int lag, double doppler_hz, double sample_rate,
                  CorrelationMode mode)
{
    const int N = static_cast<int>(a.size());
    if (b.size() != a.size()) throw DimensionError("correlate: sequences must have equal length");
    Complex acc(0.0, 0.0);
    const double w = 2.0 * kPi * doppler_hz / sample_rate;
    for (int n = 0; n < N; ++n) {
        int m = n - lag;
        if (mode == CorrelationMode::periodic) {
            m = ((m % N) + N) % N;
        } else if (m < 0 || m >= N) {
            continue;
        }
        Complex term = a(n) * std::conj(b(m));
        if (doppler_hz != 0.0) term *= std::polar(1.0, w * n);
        acc += term;
    }
    return acc;
}

CorrelationMatrix build_correlation_matrix(const WaveformSet& waves, const RangeDopplerGrid& grid,
                                           CorrelationMode mode)
{
    const int K = waves.num_users();
    const int N = waves.length();
    if (K == 0 || N == 0) throw InvalidInputError("build_correlation_matrix: empty waveform set");
    for (const auto& s : waves.sequences)
        if (s.size() != N) throw DimensionError("build_correlation_matrix: sequences must have equal length");
    if (grid.lags.empty() || grid.doppler_hz.empty())
        throw InvalidInputError("build_correlation_matrix: grid needs at least one lag and one Doppler bin");
    if (grid.max_lag() >= N) throw InvalidInputError("build_correlation_matrix: |lag| must be below sequence length");

    CorrelationMatrix out;
    out.grid = grid;
    out.num_users = K;
    out.blocks.assign(static_cast<std::size_t>(K * K), CMatrix::Zero(grid.num_lags(), grid.num_doppler()));
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < K; ++i) {
            CMatrix& blk = out.block(k, i);
            for (int li = 0; li < grid.num_lags(); ++li)
                for (int di = 0; di < grid.num_doppler(); ++di)
                    blk(li, di) = correlate(waves.sequences[static_cast<std::size_t>(k)],
                                            waves.sequences[static_cast<std::size_t>(i)], grid.lags[li],
                                            grid.doppler_hz[di], waves.sample_rate, mode);
        }
    return out;
}

int lag_window_for(const std::vector<RangeInterval>& region, double sample_rate)
{
    const double bin = kSpeedOfLight / (2.0 * sample_rate);
    double reach = 0.0;
    for (const auto& [lo, hi] : region) reach = std::max({reach, std::abs(lo), std::abs(hi)});
    return static_cast<int>(std::ceil(reach / bin - 1e-12));
}

SidelobeMask build_mask(const RangeDopplerGrid& grid, const std::vector<RangeInterval>& region)
{
    const double bin = grid.bin_size_m();
    const double window = grid.max_lag() * bin;
    for (const auto& [lo, hi] : region) {
        if (!(lo <= hi)) throw InvalidInputError("build_mask: interval lower bound exceeds upper bound");
        if (std::max(std::abs(lo), std::abs(hi)) > window * (1.0 + 1e-12))
            throw InvalidInputError("build_mask: sidelobe region reaches beyond the lag window");
    }
    SidelobeMask mask;
    mask.cells = RMatrix::Zero(grid.num_lags(), grid.num_doppler());
    for (int li = 0; li < grid.num_lags(); ++li) {
        const double r = grid.lags[li] * bin;
        bool inside = false;
        for (const auto& [lo, hi] : region)
            if (r >= lo && r <= hi) inside = true;
        if (inside) mask.cells.row(li).setOnes();
    }
    return mask;
}

double max_masked_cross_ratio(const CorrelationMatrix& corr, const SidelobeMask& mask)
{
    double peak = 0.0;
    double energy = 0.0;
    const int zl = corr.grid.lag_index(0);
    const int zd = corr.grid.doppler_index(0.0);
    for (int k = 0; k < corr.num_users; ++k)
        if (zl >= 0 && zd >= 0) energy = std::max(energy, std::abs(corr.block(k, k)(zl, zd)));
    for (int k = 0; k < corr.num_users; ++k)
        for (int i = 0; i < corr.num_users; ++i) {
            if (k == i) continue;
            peak = std::max(peak, corr.block(k, i).cwiseAbs().cwiseProduct(mask.cells).maxCoeff());
        }
    return energy > 0.0 ? peak / energy : 0.0;
}

} // namespace isac
