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

#include "isac/ambiguity.hpp"
#include "isac/channel.hpp"
#include "isac/conic.hpp"

#include <string>
#include <vector>

namespace isac {

/// Constraint levels of the joint design, all linear (mW, linear SINR).
struct DesignConstraints {
    double max_power_mw = 1.0;
    double min_sinr = db_to_linear(16.0);
    double target_gain_mw = db_to_linear(13.0);
    double noise_power_mw = 1e-3;
    double target_angle_rad = 0.0;

    /// Positivity checks plus the gain precheck target_gain <= max_power * M.
    void validate(int num_antennas) const;
};

/// Covariances R_k of the relaxation; total() is R_W.
struct CovarianceSet {
    std::vector<CMatrix> R;

    CMatrix total() const;
    int num_users() const { return static_cast<int>(R.size()); }
    static CovarianceSet from_beamformer(const CMatrix& W);
};

/// Linear forms over the model variables [scalars | hvec(R_1) | ... | hvec(R_K)],
/// every scalar constrained non-negative.
class SdrModel {
public:
    enum class Sense { equal, less_equal, greater_equal };

    SdrModel(int num_antennas, int num_users, int num_scalars = 0);

    int num_antennas() const { return M_; }
    int num_users() const { return K_; }
    int num_scalars() const { return S_; }
    int dimension() const { return S_ + K_ * M_ * M_; }
    int block_offset(int k) const { return S_ + k * M_ * M_; }

    RVector zero_form() const { return RVector::Zero(dimension()); }
    /// form += coefficient-wise map R_k -> Re tr(C R_k)
    void add_block_term(RVector& form, int k, const CMatrix& C) const;
    /// form += Re tr(C R_W)
    void add_total_term(RVector& form, const CMatrix& C) const;

    void add_constraint(RVector form, Sense sense, double rhs, std::string label);

    void minimize(RVector form);
    void maximize(RVector form);
    /// minimize || rows * v ||, rows has dimension() columns.
    void minimize_norm(RMatrix rows);

    // Standard constraint families shared by the designs.
    void add_power_budget(double max_power_mw, bool equality = false);
    void add_sinr_constraints(const ChannelSet& channels, double min_sinr, double noise_power_mw);
    void add_gain_equality(const ArrayGeometry& geometry, double theta0, double gain_mw);

    struct Row {
        RVector form;
        Sense sense;
        double rhs;
        std::string label;
    };
    const std::vector<Row>& constraints() const { return rows_; }
    int count(const std::string& label_prefix) const;

    enum class Objective { none, linear, norm };
    Objective objective_kind() const { return objective_; }
    const RVector& linear_objective() const { return linear_; }
    /// -1 when the linear objective came from maximize().
    double objective_sign() const { return sign_; }
    const RMatrix& norm_rows() const { return norm_rows_; }

private:
    int M_, K_, S_;
    std::vector<Row> rows_;
    Objective objective_ = Objective::none;
    RVector linear_;
    double sign_ = 1.0;
    RMatrix norm_rows_;
};

/// Conic program assembled from an SdrModel plus the maps back to model variables.
struct ConicProblem {
    conic::Problem conic;
    int num_antennas = 0;
    int num_users = 0;
    int num_scalars = 0;
    int slack_count = 0;
    int epigraph_index = -1;        // index of t in the SOC, or -1
    int norm_rows_original = 0;
    int norm_rows_compressed = 0;
    double objective_scale = 1.0;   // model objective = objective_scale * c^T x
    double objective_sign = 1.0;    // -1 for maximization
    std::vector<int> psd_orders;    // complex orders
    int sinr_constraints = 0;
    int power_constraints = 0;
    int gain_equalities = 0;

    int psd_offset(int k) const { return conic.cones.hpsd_offset(static_cast<std::size_t>(k)); }
    /// Order of the equivalent real symmetric embedding of block k.
    int real_embedding_order(int k) const { return 2 * psd_orders[static_cast<std::size_t>(k)]; }
};

ConicProblem assemble(const SdrModel& model);

enum class SolveStatus { optimal, near_optimal, infeasible, error };
std::string to_string(SolveStatus s);

struct ConicSolution {
    SolveStatus status = SolveStatus::error;
    CovarianceSet covariances;
    RVector scalars;
    double objective = 0.0;        // in model units (e.g. sqrt(ISL) for the norm objective)
    double relative_gap = 0.0;
    int iterations = 0;
    std::string diagnostics;

    bool usable() const { return status == SolveStatus::optimal || status == SolveStatus::near_optimal; }
};

/// Solves to the given relative duality gap.
ConicSolution solve(const ConicProblem& problem, double relative_gap = 1e-7);

/// Rows whose norm equals sqrt(isl_vectorized(R)) for every covariance set.
RMatrix isl_objective_rows(const SdrModel& model, const ArrayGeometry& geometry, const CorrelationMatrix& corr,
                           const SidelobeMask& mask, double theta0, const AngleGrid& omega);

/// Problem (P2): minimize sqrt(ISL) subject to power, SINR and target gain.
/// Throws InfeasibleError when the gain target exceeds max_power * M.
ConicProblem build_qsdp(const DesignConstraints& constraints, const ChannelSet& channels,
                        const ArrayGeometry& geometry, const CorrelationMatrix& corr, const SidelobeMask& mask,
                        const AngleGrid& omega);

} // namespace isac
