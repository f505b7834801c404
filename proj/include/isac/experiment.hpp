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

#include "isac/config.hpp"
#include "isac/evaluation.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace isac {

/// Named per-stage stream derived from the master seed ("channel",
/// "randomization", "sweep-cell", ...). Stable across platforms.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0);

/// Everything the designs and the evaluation need for one channel draw.
/// Holds the objects a DesignContext points into; not copyable.
struct Scenario {
    ArrayGeometry geometry;
    ChannelConfig channel_config;
    ChannelSet channels;
    WaveformSet waves;
    CorrelationMatrix corr;
    SidelobeMask mask;
    AngleGrid omega;
    DesignConstraints constraints;
    double cross_block_ratio = 0.0;
    NarrowbandCheck narrowband;

    Scenario() = default;
    Scenario(const Scenario&) = delete;
    Scenario& operator=(const Scenario&) = delete;

    DesignContext context(const ExperimentConfig& config) const;
};

/// Builds geometry, channels (seeded with derive_seed(config.seed, "channel")),
/// waveforms, correlation matrix, mask and angle grid. Throws ConfigError when
/// the masked cross-blocks exceed config.cross_block_threshold.
std::unique_ptr<Scenario> build_scenario(const ExperimentConfig& config);

enum class ExitCode : int { ok = 0, config_error = 1, solver_failure = 2, verification_failure = 3 };

struct DesignStatus {
    std::string design;
    std::string status;      // ok, infeasible, solver_error, verification_failed, ...
    std::string message;
};

struct RunManifest {
    std::string config_hash;
    std::string code_version;
    std::string subcommand;
    std::uint64_t seed = 0;
    std::vector<DesignStatus> designs;
    std::vector<std::string> files;     // relative to the output directory
    std::vector<std::string> warnings;
    int exit_code = 0;
    std::string error;

    std::string to_json() const;
};

const char* code_version();

/// Writes manifest.json into dir, creating it when needed. Returns false if that fails.
bool write_manifest(const RunManifest& manifest, const std::string& dir);

/// Runs a subcommand (design, heatmaps, cuts, beampattern, sweep, verify) and
/// writes manifest.json into the output directory, also on failure.
RunManifest run(const ExperimentConfig& config, const std::string& subcommand, std::ostream& log);

} // namespace isac
