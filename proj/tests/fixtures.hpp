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

// Small scenarios shared by the unit and acceptance tests.

#include "isac/designs.hpp"
#include "isac/waveform.hpp"

#include <memory>
#include <optional>
#include <random>

namespace isac::testing {

struct Toy {
    ArrayGeometry geometry;
    ChannelSet channels;
    WaveformSet waves;
    CorrelationMatrix corr;
    SidelobeMask mask;
    AngleGrid omega;
    DesignConstraints constraints;

    Toy() = default;
    Toy(const Toy&) = delete;
    Toy& operator=(const Toy&) = delete;

    DesignContext context() const
    {
        DesignContext ctx;
        ctx.geometry = &geometry;
        ctx.channels = &channels;
        ctx.corr = &corr;
        ctx.mask = &mask;
        ctx.omega = &omega;
        ctx.constraints = constraints;
        ctx.extraction.threads = 1;
        return ctx;
    }
};

/// M = 8, K = 2, N = 64 Zadoff-Chu (roots 1, 3), lags -16..16, range region
/// of bins 2..16 on each side, Omega = [-10,-5] U [5,10] deg at 0.5 deg.
/// Gain target 5 mW (P_t * M = 8 mW), SINR target 10 dB.
inline std::unique_ptr<Toy> make_toy(std::uint64_t seed = 7, int M = 8, int K = 2)
{
    auto t = std::make_unique<Toy>();
    t->geometry = ArrayGeometry::half_wavelength(M);
    ChannelConfig cc;
    cc.num_users = K;
    cc.los_dods_rad = {deg_to_rad(-30.0), deg_to_rad(30.0), deg_to_rad(45.0)};
    cc.los_dods_rad.resize(static_cast<std::size_t>(K));
    cc.seed = seed;
    t->channels = generate_channels(cc, t->geometry);
    std::vector<int> roots{1, 3, 5};
    roots.resize(static_cast<std::size_t>(K));
    t->waves = make_zadoff_chu_waveforms(roots, 64, 10e6);
    const RangeDopplerGrid grid = RangeDopplerGrid::symmetric(16, 10e6);
    t->corr = build_correlation_matrix(t->waves, grid);
    const double bin = grid.bin_size_m();
    t->mask = build_mask(grid, {{-16.0 * bin, -2.0 * bin + 1e-6}, {2.0 * bin - 1e-6, 16.0 * bin}});
    t->omega = make_angle_grid({{-10.0, -5.0}, {5.0, 10.0}}, 0.5);
    t->constraints.min_sinr = db_to_linear(10.0);
    t->constraints.target_gain_mw = 5.0;
    return t;
}

inline CMatrix random_beamformer(std::mt19937_64& rng, int M, int K, double power = 1.0)
{
    std::normal_distribution<double> n(0.0, 1.0);
    CMatrix W(M, K);
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) W(m, k) = Complex(n(rng), n(rng));
    return W * std::sqrt(power / W.squaredNorm());
}

inline CMatrix random_psd(std::mt19937_64& rng, int M, int rank)
{
    const CMatrix F = random_beamformer(rng, M, rank);
    return F * F.adjoint();
}

/// Random beamformer meeting power <= P_t, SINR >= Gamma_c and gain == Gamma_s
/// exactly. Each user gets a zero-forcing direction with a random SINR margin
/// in [1, 2]; a random component in the users' common null space, steered
/// loosely toward the target, is then scaled to hit the gain. nullopt when the
/// draw exceeds the power budget.
inline std::optional<CMatrix> random_feasible_beamformer(std::mt19937_64& rng, const Toy& t)
{
    const CMatrix& H = t.channels.H;
    const int M = static_cast<int>(H.rows()), K = static_cast<int>(H.cols());
    const DesignConstraints& c = t.constraints;
    const CVector b0 = steering_vector(t.geometry, 0.0, c.target_angle_rad);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n(0.0, 1.0);

    const CMatrix Pnull = CMatrix::Identity(M, M) - H * (H.adjoint() * H).inverse() * H.adjoint();
    CMatrix A(M, K), S(M, K);
    for (int k = 0; k < K; ++k) {
        CMatrix others(M, K - 1);
        for (int i = 0, j = 0; i < K; ++i)
            if (i != k) others.col(j++) = H.col(i);
        CVector v = H.col(k);
        if (K > 1) v -= others * (others.adjoint() * others).inverse() * (others.adjoint() * H.col(k));
        v.normalize();
        const double margin = 1.0 + u(rng);
        const double amp = std::sqrt(margin * c.min_sinr * c.noise_power_mw / std::norm(H.col(k).dot(v)));
        A.col(k) = v * std::polar(amp, 2.0 * kPi * u(rng));
        CVector r(M);
        for (int m = 0; m < M; ++m) r(m) = Complex(n(rng), n(rng));
        S.col(k) = Pnull * (b0 * std::polar(1.0, 2.0 * kPi * u(rng)) + 0.5 * r);
    }
    // gain(s) = sum_k |b0^H (a_k + s s_k)|^2 = q2 s^2 + q1 s + q0
    double q2 = 0.0, q1 = 0.0, q0 = 0.0;
    for (int k = 0; k < K; ++k) {
        const Complex x = b0.dot(A.col(k)), y = b0.dot(S.col(k));
        q2 += std::norm(y);
        q1 += 2.0 * std::real(std::conj(x) * y);
        q0 += std::norm(x);
    }
    const double disc = q1 * q1 - 4.0 * q2 * (q0 - c.target_gain_mw);
    if (q2 <= 0.0 || disc < 0.0) return std::nullopt;
    const double s = (-q1 + std::sqrt(disc)) / (2.0 * q2);
    if (s < 0.0) return std::nullopt;
    CMatrix W = A + s * S;
    if (W.squaredNorm() > c.max_power_mw) return std::nullopt;
    return W;
}

} // namespace isac::testing
