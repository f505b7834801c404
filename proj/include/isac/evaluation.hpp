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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace isac {

struct MetricsBundle {
    DesignKind design = DesignKind::proposed;
    double islr_db = 0.0;         // isl_direct over the mainlobe cell, receive factor omitted
    double isl = 0.0;
    double mainlobe = 0.0;
    RVector per_user_sinr_db;
    double total_power_mw = 0.0;
    double target_gain_mw = 0.0;
};

MetricsBundle compute_metrics(DesignKind design, const CMatrix& W, const DesignContext& ctx);

/// Constraint levels checked for a design: comm-only has no gain target,
/// sensing-only no SINR target, the max-gain and beampattern designs no gain equality.
bool design_has_sinr_constraint(DesignKind kind);
bool design_has_gain_equality(DesignKind kind);

struct VerificationReport {
    bool passed = true;
    std::vector<std::string> failures;
};

/// power <= P_t (1 + power_tol); SINR_k >= Gamma_c (1 - sinr_slack) when checked;
/// |gain - Gamma_s| <= gain_tol * Gamma_s when checked.
VerificationReport verify_beamformer(const CMatrix& W, const ChannelSet& channels, const ArrayGeometry& geometry,
                                     const DesignConstraints& constraints, bool check_sinr, bool check_gain,
                                     double gain_tol = 1e-3, double power_tol = 1e-6, double sinr_slack = 1e-4);

/// A one-dimensional AF cut in dB, normalized so its largest value is 0 dB.
struct Cut {
    std::vector<double> axis;     // meters (range cut) or degrees (angle cut)
    RVector mag_db;
};

/// |chi| along every grid lag at theta1 = theta0, zero Doppler.
Cut range_cut(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr, double theta0,
              bool include_receive_factor = true);

/// |chi| at zero lag and Doppler over theta1 (radians); axis in degrees.
Cut angle_cut(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr, double theta0,
              const std::vector<double>& angles, bool include_receive_factor = true);

/// |chi| in dB over angles x grid lags, normalized to the global maximum.
struct Heatmap {
    std::vector<double> angles_deg;
    std::vector<double> delta_r_m;
    RMatrix mag_db;               // angles x lags
};

Heatmap heatmap(const CMatrix& W, const ArrayGeometry& geometry, const CorrelationMatrix& corr, double theta0,
                const std::vector<double>& angles, bool include_receive_factor = true);

/// Transmit beampattern b^H R_W b in dBm.
RVector beampattern_dbm(const CMatrix& W, const ArrayGeometry& geometry, const std::vector<double>& angles);

/// Largest value of a range cut over the closed range intervals (dB).
double max_sidelobe_db(const Cut& cut, const std::vector<RangeInterval>& region);

/// Median, averaging the two middle values for even sizes. Throws on empty input.
double median(std::vector<double> values);

struct SweepRow {
    double gamma_c_db = 0.0;
    double gamma_s_db = 0.0;
    DesignKind design = DesignKind::proposed;
    double median_islr_db = 0.0;
    int n_seeds = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;          // cells with at least one successful seed
    std::vector<std::string> skipped;    // reasons for failed (cell, design, seed) runs
    double proposed_spread_db = 0.0;     // max - min of the proposed median over the grid
};

/// Inputs shared by every sweep cell. Channels are redrawn per seed.
struct SweepSetup {
    ArrayGeometry geometry;
    ChannelConfig channel;
    const CorrelationMatrix* corr = nullptr;
    const SidelobeMask* mask = nullptr;
    const AngleGrid* omega = nullptr;
    DesignConstraints base;
    ExtractionOptions extraction;
    double solver_eps = 1e-7;
    BeampatternSpec beampattern;
    std::vector<std::uint64_t> channel_seeds;
    int threads = 0;                     // 0: hardware concurrency
};

/// Median ISLR over the channel seeds for every (Gamma_c, Gamma_s, design) cell.
SweepResult sweep_islr(const SweepSetup& setup, const std::vector<double>& gamma_c_db,
                       const std::vector<double>& gamma_s_db, const std::vector<DesignKind>& designs);

// CSV exports. Values are written with enough digits to round-trip.
void write_heatmap_csv(std::ostream& os, const std::string& design, const Heatmap& map, bool header = true);
void write_cut_csv(std::ostream& os, const std::string& design, const Cut& cut, bool header = true);
void write_beampattern_csv(std::ostream& os, const std::string& design, const std::vector<double>& angles,
                           const RVector& gain_dbm, bool header = true);
void write_sweep_csv(std::ostream& os, const SweepResult& result);
/// AF heatmap rows (theta_deg, delta_r_m, magnitude_db).
void write_af_heatmap_csv(std::ostream& os, const Heatmap& map);

/// One row per antenna: re(w_1), im(w_1), ..., re(w_K), im(w_K).
void write_beamformer_csv(std::ostream& os, const CMatrix& W);
CMatrix read_beamformer_csv(const std::string& path);

} // namespace isac
