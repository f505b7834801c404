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

#include "isac/channel.hpp"

#include <random>

namespace isac {

void ChannelConfig::validate() const
{
    if (num_users < 1) throw ConfigError("channel: need at least one user");
    if (paths_per_user < 1) throw ConfigError("channel: paths_per_user must be >= 1");
    if (!(los_energy_fraction > 0.0 && los_energy_fraction <= 1.0))
        throw ConfigError("channel: los_energy_fraction must lie in (0, 1]");
    if (paths_per_user == 1 && los_energy_fraction < 1.0)
        throw ConfigError("channel: a single path must carry all of the energy (los_energy_fraction = 1)");
    if (!(noise_power_mw > 0.0)) throw ConfigError("channel: noise power must be positive");
    if (static_cast<int>(los_dods_rad.size()) != num_users)
        throw ConfigError("channel: need one LoS DoD per user");
    if (!path_loss.empty() && static_cast<int>(path_loss.size()) != num_users)
        throw ConfigError("channel: path_loss must be empty or have one entry per user");
    for (double g : path_loss)
        if (!(g > 0.0)) throw ConfigError("channel: path loss must be positive");
}

double ChannelConfig::path_loss_of(int k) const
{
    return path_loss.empty() ? 1.0 : path_loss[static_cast<std::size_t>(k)];
}

ChannelSet generate_channels(const ChannelConfig& config, const ArrayGeometry& geometry)
{
    config.validate();
    geometry.validate();

    const int K = config.num_users;
    const int L = config.paths_per_user;
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> dod(-kPi / 2, kPi / 2);
    std::normal_distribution<double> normal(0.0, 1.0);

    ChannelSet out;
    out.H = CMatrix::Zero(geometry.num_antennas, K);
    out.path_gains = CMatrix::Zero(L, K);
    out.path_dods = RMatrix::Zero(L, K);

    const double nlos_var = L > 1 ? (1.0 - config.los_energy_fraction) / (L - 1) : 0.0;
    for (int k = 0; k < K; ++k) {
        out.path_gains(0, k) = std::polar(std::sqrt(config.los_energy_fraction), phase(rng));
        out.path_dods(0, k) = config.los_dods_rad[static_cast<std::size_t>(k)];
        for (int l = 1; l < L; ++l) {
            const double re = normal(rng);
            const double im = normal(rng);
            out.path_gains(l, k) = std::sqrt(nlos_var / 2.0) * Complex(re, im);
            out.path_dods(l, k) = dod(rng);
        }
        CVector h = CVector::Zero(geometry.num_antennas);
        for (int l = 0; l < L; ++l)
            h += out.path_gains(l, k) * steering_vector(geometry, 0.0, out.path_dods(l, k));
        out.H.col(k) = std::sqrt(config.path_loss_of(k)) * h;
    }
    return out;
}

RVector user_sinr(const CMatrix& W, const ChannelSet& channels, double noise_power_mw)
{
    if (!(noise_power_mw > 0.0)) throw InvalidInputError("user_sinr: noise power must be positive");
    if (W.rows() != channels.H.rows() || W.cols() != channels.H.cols())
        throw DimensionError("user_sinr: W must be M x K matching the channel set");
    // G(k, n) = |h_k^H w_n|^2
    const RMatrix G = (channels.H.adjoint() * W).cwiseAbs2();
    const Eigen::Index K = W.cols();
    RVector sinr(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        const double interference = G.row(k).sum() - G(k, k);
        sinr(k) = G(k, k) / (interference + noise_power_mw);
    }
    return sinr;
}

RVector user_sinr(const std::vector<CMatrix>& covariances, const ChannelSet& channels, double noise_power_mw)
{
    if (!(noise_power_mw > 0.0)) throw InvalidInputError("user_sinr: noise power must be positive");
    const int K = channels.num_users();
    if (static_cast<int>(covariances.size()) != K) throw DimensionError("user_sinr: need one covariance per user");
    RVector sinr(K);
    for (int k = 0; k < K; ++k) {
        const CVector h = channels.h(k);
        double total = 0.0;
        double own = 0.0;
        for (int n = 0; n < K; ++n) {
            const double v = (h.adjoint() * covariances[static_cast<std::size_t>(n)] * h)(0).real();
            total += v;
            if (n == k) own = v;
        }
        sinr(k) = own / (total - own + noise_power_mw);
    }
    return sinr;
}

} // namespace isac
