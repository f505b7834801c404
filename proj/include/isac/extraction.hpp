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

#include "isac/qsdp.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace isac {

/// What a recovered beamformer must satisfy. A non-positive min_sinr or
/// target_gain_mw disables that check.
struct ExtractionTargets {
    double max_power_mw = 1.0;
    double min_sinr = 0.0;
    double target_gain_mw = 0.0;
    double noise_power_mw = 1e-3;
    double target_angle_rad = 0.0;
    bool full_power = false;          // power must equal max_power_mw (no gain target allowed)

    static ExtractionTargets from(const DesignConstraints& c, bool with_sinr, bool with_gain);
};

struct ExtractionOptions {
    double rank_one_threshold = 0.9999;
    int randomizations = 500;
    std::uint64_t seed = 1;
    double gain_tolerance = 0.01;     // relative, randomization path
    double sinr_slack = 1e-4;         // accept SINR >= (1 - slack) * target
    bool power_control = true;        // re-balance user powers of candidates that miss a target
    int threads = 0;                  // 0: hardware concurrency
};

struct ExtractionDiagnostics {
    std::vector<double> eigen_ratios; // lambda_1 / sum(lambda) per user
    bool rank_one = false;
    int candidates_drawn = 0;
    int candidates_feasible = 0;
    double relaxation_value = 0.0;    // SDR objective in score units
    double score = 0.0;               // score of the returned W
    double relaxation_gap = 0.0;      // score - relaxation_value
    std::string method;               // "eigen" or "randomization"
};

struct ExtractionResult {
    CMatrix W;
    ExtractionDiagnostics diagnostics;
};

/// Lower is better.
using BeamformerScore = std::function<double(const CMatrix& W)>;

/// lambda_1 / trace for a Hermitian PSD matrix (0 for the zero matrix).
double dominant_eigen_ratio(const CMatrix& R);

/// Rank-one recovery from SDR covariances: principal eigenvectors when every
/// block passes the threshold, Gaussian randomization otherwise. Throws
/// SolverError when no randomized candidate is feasible.
ExtractionResult extract_beamformers(const CovarianceSet& covariances, const ChannelSet& channels,
                                     const ArrayGeometry& geometry, const ExtractionTargets& targets,
                                     const BeamformerScore& score, double relaxation_value,
                                     const ExtractionOptions& options = {});

/// True when W meets the targets: power within (1 + power_tol) (and above
/// (1 - power_tol) for full_power), SINR within sinr_slack, gain within gain_tol relative.
bool meets_targets(const CMatrix& W, const ChannelSet& channels, const ArrayGeometry& geometry,
                   const ExtractionTargets& targets, double power_tol, double sinr_slack, double gain_tol);

} // namespace isac
