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

#include "isac/designs.hpp"
#include "isac/waveform.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace isac {

/// Every experiment parameter. Defaults reproduce the reference scenario
/// (M = 36, K = 3, 0 dBm budget, 16 dB SINR, 13 dB gain, ...).
/// Angles are degrees here; the library works in radians.
struct ExperimentConfig {
    // array
    int num_antennas = 36;
    double carrier_freq_hz = 28e9;
    double element_spacing_wavelengths = 0.5;

    // users and channels
    int num_users = 3;
    std::vector<double> los_dods_deg{-30.0, 30.0, 45.0};
    int paths_per_user = 3;
    double los_fraction = 0.9;
    std::vector<double> path_loss_db;   // empty: 0 dB for every user

    // constraint levels
    double max_power_dbm = 0.0;
    double min_sinr_db = 16.0;
    double noise_power_dbm = -30.0;
    double target_gain_db = 13.0;       // dB re 1 mW
    double target_angle_deg = 0.0;

    // sensing region
    std::vector<std::pair<double, double>> omega_deg{{-10.0, -5.0}, {5.0, 10.0}};
    double omega_step_deg = 0.1;
    std::vector<RangeInterval> range_region_m{{-1590.0, -90.0}, {90.0, 1590.0}};
    double sample_rate_hz = 10e6;
    int max_lag = 0;                    // 0: smallest window covering the range region
    CorrelationMode correlation = CorrelationMode::aperiodic;
    double cross_block_threshold = 0.1;
    double max_velocity_mps = 0.0;

    // waveforms
    std::vector<int> zc_roots{1, 3, 5};
    int zc_length = 512;
    std::vector<std::string> waveform_files; // one per user; overrides Zadoff-Chu when set

    // solver
    double solver_eps = 1e-7;
    int randomizations = 500;
    double rank_one_threshold = 0.9999;
    int threads = 0;

    // beampattern baselines
    double mainlobe_width_deg = 10.0;
    double pattern_step_deg = 0.1;

    // evaluation
    bool include_receive_factor = true;
    double heatmap_step_deg = 0.25;
    double cut_step_deg = 0.1;
    double beampattern_step_deg = 0.1;
    bool export_af_heatmaps = false;

    // sweep
    std::vector<double> sweep_gamma_c_db{0.0, 4.0, 8.0, 12.0, 16.0, 20.0};
    std::vector<double> sweep_gamma_s_db{13.0};
    int sweep_seeds = 10;

    std::uint64_t seed = 1;
    std::vector<DesignKind> designs = all_designs();
    std::string output_dir = "out";

    double max_power_mw() const { return db_to_linear(max_power_dbm); }
    double noise_power_mw() const { return db_to_linear(noise_power_dbm); }
    DesignConstraints constraints() const;

    /// Range, unit and consistency checks, including target gain <= P_t * M.
    /// Throws ConfigError naming the offending key.
    void validate() const;
};

/// Parses the JSON text of a config. Absent keys keep their defaults; an
/// empty document gives the defaults. Throws ConfigError with the key path.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON of the resolved config (the form hashed into the manifest).
std::string config_to_json(const ExperimentConfig& config);
/// FNV-1a 64 of config_to_json, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

enum class LevelKind {
    ratio,  // "16 dB", "39.81 lin"       -> dB
    power,  // "-30 dBm", "1 mW", "1e-3 W" -> dBm
    gain,   // power, or "13 dB" taken re 1 mW -> dBm
};

/// Parses a level string that carries its unit. Throws ConfigError naming key.
double parse_level(const std::string& text, LevelKind kind, const std::string& key);

/// "[-10,-5]∪[5,10] deg, step 0.1" -> intervals and step. "U" also works as the union.
struct IntervalSpec {
    std::vector<std::pair<double, double>> intervals;
    double step = 0.0;       // 0 when no step is given
    std::string unit;        // "deg", "m" or empty
};
IntervalSpec parse_intervals(const std::string& text, const std::string& key);

/// "proposed,comm_only" or "all". Throws ConfigError naming key.
std::vector<DesignKind> parse_design_list(const std::vector<std::string>& names, const std::string& key);
std::vector<DesignKind> parse_design_list(const std::string& comma_separated, const std::string& key);

} // namespace isac
