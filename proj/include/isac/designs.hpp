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

#include "isac/extraction.hpp"

#include <string>
#include <utility>
#include <vector>

namespace isac {

enum class DesignKind { proposed, sensing_only, comm_only, joint_maxgain, bp_matching, bp_minweighted };

std::string to_string(DesignKind kind);
/// Accepts the names produced by to_string. Throws InvalidInputError otherwise.
DesignKind parse_design(const std::string& name);
std::vector<DesignKind> all_designs();

/// Desired pattern of the beampattern baselines: 1 inside the mainlobe
/// centered at the target, 0 elsewhere, on a uniform grid over (-90, 90) deg.
struct BeampatternSpec {
    double mainlobe_width_deg = 10.0;
    double grid_step_deg = 0.1;
    // Explicit pattern (radians, linear values); replaces the mainlobe mask when set.
    std::vector<double> custom_angles_rad;
    RVector custom_values;
};

/// Everything a design needs. References must outlive the call.
struct DesignContext {
    const ArrayGeometry* geometry = nullptr;
    const ChannelSet* channels = nullptr;
    const CorrelationMatrix* corr = nullptr;
    const SidelobeMask* mask = nullptr;
    const AngleGrid* omega = nullptr;
    DesignConstraints constraints;
    ExtractionOptions extraction;
    double solver_eps = 1e-7;
    BeampatternSpec beampattern;
    double bisection_tolerance_db = 0.01;
    int bisection_max_iterations = 60;

    void validate() const;
};

struct DesignResult {
    DesignKind kind = DesignKind::proposed;
    CMatrix W;
    CovarianceSet covariances;          // SDR solution the beamformers came from
    SolveStatus status = SolveStatus::error;
    double objective = 0.0;             // SDR objective in model units
    double relative_gap = 0.0;
    int iterations = 0;                 // summed over solves
    int solves = 0;
    ExtractionDiagnostics extraction;
    std::string solver_diagnostics;     // last solve
    std::vector<std::pair<std::string, std::string>> metadata;
};

/// Runs one design end to end (SDR solve and rank-one recovery).
/// Throws InfeasibleError on an infeasible relaxation and SolverError on
/// numerical failure or failed recovery.
DesignResult run_design(DesignKind kind, const DesignContext& ctx);

DesignResult design_proposed(const DesignContext& ctx);
DesignResult design_sensing_only(const DesignContext& ctx);
DesignResult design_comm_only(const DesignContext& ctx);
DesignResult design_joint_maxgain(const DesignContext& ctx);
DesignResult design_beampattern_family(DesignKind mode, const DesignContext& ctx);

/// Desired pattern and its angle grid (radians) for the beampattern baselines.
std::pair<std::vector<double>, RVector> desired_pattern(const BeampatternSpec& spec, double theta0);

/// Score used to pick randomized candidates of the proposed design: isl_vectorized of W.
BeamformerScore isl_score(const DesignContext& ctx);

} // namespace isac
