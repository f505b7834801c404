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

#include "isac/designs.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace isac {

std::string to_string(DesignKind kind)
{
    switch (kind) {
    case DesignKind::proposed: return "proposed";
    case DesignKind::sensing_only: return "sensing_only";
    case DesignKind::comm_only: return "comm_only";
    case DesignKind::joint_maxgain: return "joint_maxgain";
    case DesignKind::bp_matching: return "bp_matching";
    case DesignKind::bp_minweighted: return "bp_minweighted";
    }
    return "proposed";
}

std::vector<DesignKind> all_designs()
{
    return {DesignKind::proposed,      DesignKind::sensing_only, DesignKind::comm_only,
            DesignKind::joint_maxgain, DesignKind::bp_matching,  DesignKind::bp_minweighted};
}

DesignKind parse_design(const std::string& name)
{
    for (DesignKind k : all_designs())
        if (to_string(k) == name) return k;
    throw InvalidInputError("unknown design '" + name + "'");
}

void DesignContext::validate() const
{
    if (!geometry || !channels || !corr || !mask || !omega)
        throw InvalidInputError("DesignContext: missing geometry, channels, correlation, mask or angle grid");
    if (channels->H.rows() != geometry->num_antennas)
        throw DimensionError("DesignContext: channel dimension does not match the array");
    if (corr->num_users != channels->num_users())
        throw DimensionError("DesignContext: waveform count does not match the number of users");
    if (!(solver_eps > 0.0)) throw InvalidInputError("DesignContext: solver tolerance must be positive");
}

namespace {

// Relative SINR back-off of the retry solve (0.0043 dB).
constexpr double kSinrBackoff = 1e-3;

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

void set_metadata(DesignResult& res, const std::string& key, const std::string& value)
{
    for (auto& [k, v] : res.metadata)
        if (k == key) {
            v = value;
            return;
        }
    res.metadata.emplace_back(key, value);
}

ConicSolution solve_checked(const SdrModel& model, const DesignContext& ctx, DesignResult& res)
{
    const ConicProblem problem = assemble(model);
    if (problem.norm_rows_original > 0)
        set_metadata(res, "objective_rows",
                     std::to_string(problem.norm_rows_original) + " -> " + std::to_string(problem.norm_rows_compressed));
    ConicSolution sol = solve(problem, ctx.solver_eps);
    res.iterations += sol.iterations;
    res.solves += 1;
    res.solver_diagnostics = sol.diagnostics;
    res.status = sol.status;
    res.relative_gap = sol.relative_gap;
    if (sol.status == SolveStatus::infeasible)
        throw InfeasibleError(to_string(res.kind) + ": relaxation is infeasible (" + sol.diagnostics + ")");
    if (!sol.usable()) throw SolverError(to_string(res.kind) + ": solver failed (" + sol.diagnostics + ")");
    return sol;
}

void finish(DesignResult& res, const ConicSolution& sol, const DesignContext& ctx, const ExtractionTargets& targets,
            const BeamformerScore& score, double relaxation_value)
{
    res.objective = sol.objective;
    res.covariances = sol.covariances;
    ExtractionResult ex =
        extract_beamformers(sol.covariances, *ctx.channels, *ctx.geometry, targets, score, relaxation_value,
                            ctx.extraction);
    res.W = std::move(ex.W);
    res.extraction = std::move(ex.diagnostics);
}

using ModelBuilder = std::function<SdrModel(double sinr_scale)>;
using RelaxationValue = std::function<double(const ConicSolution&)>;

// Solves the relaxation and recovers beamformers. When recovery fails with
// SINR targets present, the relaxation is solved once more with the SINR
// levels raised by kSinrBackoff; the beamformers are still certified against
// the original targets.
void solve_and_extract(DesignResult& res, const DesignContext& ctx, const ModelBuilder& build,
                       const ExtractionTargets& targets, const BeamformerScore& score, const RelaxationValue& relax)
{
    const ConicSolution sol = solve_checked(build(1.0), ctx, res);
    try {
        finish(res, sol, ctx, targets, score, relax(sol));
        return;
    } catch (const SolverError&) {
        if (!(targets.min_sinr > 0.0)) throw;
    }
    const ConicSolution retry = solve_checked(build(1.0 + kSinrBackoff), ctx, res);
    finish(res, retry, ctx, targets, score, relax(retry));
    set_metadata(res, "sinr_backoff", fmt(kSinrBackoff));
}

double min_sinr(const CMatrix& W, const DesignContext& ctx)
{
    return user_sinr(W, *ctx.channels, ctx.constraints.noise_power_mw).minCoeff();
}

} // namespace

BeamformerScore isl_score(const DesignContext& ctx)
{
    return [&ctx](const CMatrix& W) {
        return isl_vectorized(CovarianceSet::from_beamformer(W).R, *ctx.geometry, *ctx.corr, *ctx.mask,
                              ctx.constraints.target_angle_rad, *ctx.omega);
    };
}

DesignResult design_proposed(const DesignContext& ctx)
{
    ctx.validate();
    ctx.constraints.validate(ctx.geometry->num_antennas);
    DesignResult res;
    res.kind = DesignKind::proposed;
    const DesignConstraints& c = ctx.constraints;
    auto build = [&](double sinr_scale) {
        SdrModel model(ctx.geometry->num_antennas, ctx.channels->num_users());
        model.add_power_budget(c.max_power_mw);
        model.add_sinr_constraints(*ctx.channels, c.min_sinr * sinr_scale, c.noise_power_mw);
        model.add_gain_equality(*ctx.geometry, c.target_angle_rad, c.target_gain_mw);
        model.minimize_norm(isl_objective_rows(model, *ctx.geometry, *ctx.corr, *ctx.mask, c.target_angle_rad,
                                               *ctx.omega));
        return model;
    };
    // objective is sqrt(ISL); candidates are scored in ISL units
    solve_and_extract(res, ctx, build, ExtractionTargets::from(c, true, true), isl_score(ctx),
                      [](const ConicSolution& s) { return s.objective * s.objective; });
    return res;
}

DesignResult design_sensing_only(const DesignContext& ctx)
{
    ctx.validate();
    ctx.constraints.validate(ctx.geometry->num_antennas);
    DesignResult res;
    res.kind = DesignKind::sensing_only;
    SdrModel model(ctx.geometry->num_antennas, ctx.channels->num_users());
    model.add_power_budget(ctx.constraints.max_power_mw);
    model.add_gain_equality(*ctx.geometry, ctx.constraints.target_angle_rad, ctx.constraints.target_gain_mw);
    model.minimize_norm(
        isl_objective_rows(model, *ctx.geometry, *ctx.corr, *ctx.mask, ctx.constraints.target_angle_rad, *ctx.omega));
    const ConicSolution sol = solve_checked(model, ctx, res);
    finish(res, sol, ctx, ExtractionTargets::from(ctx.constraints, false, true), isl_score(ctx),
           sol.objective * sol.objective);
    return res;
}

DesignResult design_comm_only(const DesignContext& ctx)
{
    ctx.validate();
    DesignResult res;
    res.kind = DesignKind::comm_only;
    const auto& ch = *ctx.channels;
    const double pt = ctx.constraints.max_power_mw;
    const double noise = ctx.constraints.noise_power_mw;
    const int M = ctx.geometry->num_antennas;
    const int K = ch.num_users();

    // Bisection on the common SINR level t (dB). Feasibility of t is decided by
    // the minimum power needed to reach it under the SINR constraints.
    // Upper end: the interference-free single-user SINR of the weakest user.
    double hi = -kDbFloor;
    for (int k = 0; k < K; ++k) hi = std::min(hi, linear_to_db(pt * ch.h(k).squaredNorm() / noise));
    double lo = hi - 100.0;
    ConicSolution best;
    auto min_power = [&](double t_db) {
        SdrModel model(M, K);
        model.add_sinr_constraints(ch, db_to_linear(t_db), noise);
        RVector f = model.zero_form();
        model.add_total_term(f, CMatrix::Identity(M, M));
        model.minimize(f);
        return solve_checked(model, ctx, res);
    };
    int it = 0;
    {
        ConicSolution s = min_power(lo);
        if (s.objective > pt) throw InfeasibleError("comm_only: even the lowest bisection level exceeds the power budget");
        best = std::move(s);
    }
    while (hi - lo > ctx.bisection_tolerance_db) {
        if (++it > ctx.bisection_max_iterations)
            throw SolverError("comm_only: bisection did not converge within " +
                              std::to_string(ctx.bisection_max_iterations) + " iterations");
        const double mid = 0.5 * (lo + hi);
        ConicSolution s = min_power(mid);
        if (s.objective <= pt) {
            lo = mid;
            best = std::move(s);
        } else {
            hi = mid;
        }
    }

    // Spend the remaining budget: scaling every R_k up only raises the SINRs.
    const double used = best.covariances.total().trace().real();
    if (used > 0.0)
        for (auto& R : best.covariances.R) R *= pt / used;
    best.objective = lo;
    res.metadata.emplace_back("bisection_iterations", std::to_string(it));
    res.metadata.emplace_back("max_min_sinr_db", fmt(lo));

    ExtractionTargets targets;
    targets.max_power_mw = pt;
    targets.min_sinr = db_to_linear(lo);
    targets.noise_power_mw = noise;
    targets.target_angle_rad = ctx.constraints.target_angle_rad;
    finish(res, best, ctx, targets, [&ctx](const CMatrix& W) { return -min_sinr(W, ctx); }, -db_to_linear(lo));
    return res;
}

DesignResult design_joint_maxgain(const DesignContext& ctx)
{
    ctx.validate();
    DesignResult res;
    res.kind = DesignKind::joint_maxgain;
    const DesignConstraints& c = ctx.constraints;
    const int M = ctx.geometry->num_antennas;
    const CVector b0 = steering_vector(*ctx.geometry, 0.0, c.target_angle_rad);
    auto build = [&](double sinr_scale) {
        SdrModel model(M, ctx.channels->num_users());
        model.add_power_budget(c.max_power_mw);
        model.add_sinr_constraints(*ctx.channels, c.min_sinr * sinr_scale, c.noise_power_mw);
        RVector f = model.zero_form();
        model.add_total_term(f, b0 * b0.adjoint());
        model.maximize(f);
        return model;
    };
    const double theta0 = c.target_angle_rad;
    const ArrayGeometry& geom = *ctx.geometry;
    solve_and_extract(
        res, ctx, build, ExtractionTargets::from(c, true, false),
        [&geom, theta0](const CMatrix& W) { return -target_gain(W, geom, 0.0, theta0); },
        [](const ConicSolution& s) { return -s.objective; });
    return res;
}

std::pair<std::vector<double>, RVector> desired_pattern(const BeampatternSpec& spec, double theta0)
{
    if (!spec.custom_angles_rad.empty()) {
        if (spec.custom_values.size() != static_cast<Eigen::Index>(spec.custom_angles_rad.size()))
            throw InvalidInputError("beampattern spec: custom pattern needs one value per angle");
        return {spec.custom_angles_rad, spec.custom_values};
    }
    if (!(spec.grid_step_deg > 0.0) || !(spec.mainlobe_width_deg > 0.0))
        throw InvalidInputError("beampattern spec: step and mainlobe width must be positive");
    const double edge = 90.0 - spec.grid_step_deg;
    std::vector<double> angles = uniform_angles_rad(-edge, edge, spec.grid_step_deg);
    RVector d(static_cast<Eigen::Index>(angles.size()));
    const double half = 0.5 * deg_to_rad(spec.mainlobe_width_deg) + 1e-12;
    for (std::size_t p = 0; p < angles.size(); ++p)
        d(static_cast<Eigen::Index>(p)) = std::abs(angles[p] - theta0) <= half ? 1.0 : 0.0;
    return {std::move(angles), std::move(d)};
}

DesignResult design_beampattern_family(DesignKind mode, const DesignContext& ctx)
{
    if (mode != DesignKind::bp_matching && mode != DesignKind::bp_minweighted)
        throw InvalidInputError("design_beampattern_family: mode must be bp_matching or bp_minweighted");
    ctx.validate();
    DesignResult res;
    res.kind = mode;
    const int M = ctx.geometry->num_antennas;
    const int K = ctx.channels->num_users();
    const auto [angles, d] = desired_pattern(ctx.beampattern, ctx.constraints.target_angle_rad);
    const Eigen::Index P = d.size();

    std::vector<CVector> steer;
    for (double a : angles) steer.push_back(steering_vector(*ctx.geometry, 0.0, a));
    const DesignConstraints& c = ctx.constraints;

    // Scalar 0 is alpha (matching) or the minimum mainlobe gain (minweighted).
    // Full transmit power: with a free scale alpha the matching residual is
    // otherwise minimized by radiating as little as the SINR constraints allow.
    auto build = [&](double sinr_scale) {
        SdrModel model(M, K, 1);
        model.add_power_budget(c.max_power_mw, true);
        model.add_sinr_constraints(*ctx.channels, c.min_sinr * sinr_scale, c.noise_power_mw);
        if (mode == DesignKind::bp_matching) {
            RMatrix rows = RMatrix::Zero(P, model.dimension());
            for (Eigen::Index p = 0; p < P; ++p) {
                const CVector& b = steer[static_cast<std::size_t>(p)];
                RVector f = model.zero_form();
                f(0) = d(p);
                model.add_total_term(f, -b * b.adjoint());
                rows.row(p) = f.transpose();
            }
            model.minimize_norm(std::move(rows));
        } else {
            for (Eigen::Index p = 0; p < P; ++p) {
                if (d(p) == 0.0) continue;
                const CVector& b = steer[static_cast<std::size_t>(p)];
                RVector f = model.zero_form();
                f(0) = -1.0;
                model.add_total_term(f, b * b.adjoint());
                model.add_constraint(std::move(f), SdrModel::Sense::greater_equal, 0.0, "mainlobe");
            }
            RVector obj = model.zero_form();
            obj(0) = 1.0;
            model.maximize(std::move(obj));
        }
        return model;
    };

    const ArrayGeometry& geom = *ctx.geometry;
    BeamformerScore score;
    if (mode == DesignKind::bp_matching) {
        score = [&geom, angles = angles, d = d](const CMatrix& W) {
            const RVector g = beampattern(W * W.adjoint(), geom, angles);
            const double alpha = std::max(0.0, d.dot(g) / d.squaredNorm());
            return (alpha * d - g).norm();
        };
    } else {
        std::vector<double> main;
        for (Eigen::Index p = 0; p < P; ++p)
            if (d(p) != 0.0) main.push_back(angles[static_cast<std::size_t>(p)]);
        score = [&geom, main](const CMatrix& W) { return -beampattern(W * W.adjoint(), geom, main).minCoeff(); };
    }
    if (ctx.beampattern.custom_angles_rad.empty()) {
        res.metadata.emplace_back("mainlobe_width_deg", fmt(ctx.beampattern.mainlobe_width_deg));
        res.metadata.emplace_back("pattern_grid_step_deg", fmt(ctx.beampattern.grid_step_deg));
    } else {
        res.metadata.emplace_back("pattern", "custom");
    }
    res.metadata.emplace_back("pattern_weights", "uniform");
    const bool matching = mode == DesignKind::bp_matching;
    ExtractionTargets targets = ExtractionTargets::from(c, true, false);
    targets.full_power = true;
    solve_and_extract(res, ctx, build, targets, score,
                      [matching](const ConicSolution& s) { return matching ? s.objective : -s.objective; });
    return res;
}

DesignResult run_design(DesignKind kind, const DesignContext& ctx)
{
    switch (kind) {
    case DesignKind::proposed: return design_proposed(ctx);
    case DesignKind::sensing_only: return design_sensing_only(ctx);
    case DesignKind::comm_only: return design_comm_only(ctx);
    case DesignKind::joint_maxgain: return design_joint_maxgain(ctx);
    case DesignKind::bp_matching:
    case DesignKind::bp_minweighted: return design_beampattern_family(kind, ctx);
    }
    throw InvalidInputError("run_design: unknown design");
}

} // namespace isac
