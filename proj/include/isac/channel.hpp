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

#include <cstdint>
#include <vector>

namespace isac {

/// Extended Saleh-Valenzuela multiuser channel parameters.
struct ChannelConfig {
    int num_users = 3;
    int paths_per_user = 3;
    double los_energy_fraction = 0.9;
    std::vector<double> path_loss;            // linear g_k; empty means 1 for every user
    double noise_power_mw = 1e-3;
    std::vector<double> los_dods_rad;         // one per user
    std::uint64_t seed = 1;

    void validate() const;
    double path_loss_of(int k) const;
};

/// Per-user channels h_k (columns of H) and the path draws that produced them.
struct ChannelSet {
    CMatrix H;            // M x K
    CMatrix path_gains;   // L_p x K, beta_{l,k}; row 0 is the LoS path
    RMatrix path_dods;    // L_p x K, radians

    int num_users() const { return static_cast<int>(H.cols()); }
    CVector h(int k) const { return H.col(k); }
};

/// h_k = sqrt(g_k) sum_l beta_{l,k} b_T(0, phi_{l,k}). The LoS gain has modulus
/// sqrt(los_fraction) and uniform phase; NLoS gains are CN(0, (1 - los)/(L_p - 1))
/// with DoDs uniform on (-pi/2, pi/2). Deterministic in config.seed.
ChannelSet generate_channels(const ChannelConfig& config, const ArrayGeometry& geometry);

/// SINR_k = |h_k^H w_k|^2 / (sum_{n != k} |h_k^H w_n|^2 + sigma^2), linear.
RVector user_sinr(const CMatrix& W, const ChannelSet& channels, double noise_power_mw);

/// Same quotient from covariance matrices: h^H R_k h / (h^H (R_W - R_k) h + sigma^2).
RVector user_sinr(const std::vector<CMatrix>& covariances, const ChannelSet& channels, double noise_power_mw);

} // namespace isac
