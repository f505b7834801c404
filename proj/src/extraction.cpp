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

#include "isac/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace isac {

ExtractionTargets ExtractionTargets::from(const DesignConstraints& c, bool with_sinr, bool with_gain)
{
    ExtractionTargets t;
    t.max_power_mw = c.max_power_mw;
    t.min_sinr = with_sinr ? c.min_sinr : 0.0;
    t.target_gain_mw = with_gain ? c.target_gain_mw : 0.0;
    t.noise_power_mw = c.noise_power_mw;
    t.target_angle_rad = c.target_angle_rad;
    return t;
}

double dominant_eigen_ratio(const CMatrix& R)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(R, Eigen::EigenvaluesOnly);
    const RVector ev = es.eigenvalues().cwiseMax(0.0);
    const double sum = ev.sum();
    return sum > 0.0 ? ev(ev.size() - 1) / sum : 0.0;
}

bool meets_targets(const CMatrix& W, const ChannelSet& channels, const ArrayGeometry& geometry,
                   const ExtractionTargets& targets, double power_tol, double sinr_slack, double gain_tol)
{
    const double power = W.squaredNorm();
    if (power > targets.max_power_mw * (1.0 + power_tol)) return false;
    if (targets.full_power && power < targets.max_power_mw * (1.0 - power_tol)) return false;
    if (targets.min_sinr > 0.0) {
        const RVector sinr = user_sinr(W, channels, targets.noise_power_mw);
        if (sinr.minCoeff() < targets.min_sinr * (1.0 - sinr_slack)) return false;
    }
    if (targets.target_gain_mw > 0.0) {
        const double g = target_gain(W, geometry, 0.0, targets.target_angle_rad);
        if (std::abs(g - targets.target_gain_mw) > gain_tol * targets.target_gain_mw) return false;
    }
    return true;
}

namespace {

CMatrix principal_beamformers(const CovarianceSet& cov, const CVector& b0)
{
    const int K = cov.num_users();
    const Eigen::Index M = cov.R.front().rows();
    CMatrix W(M, K);
    for (int k = 0; k < K; ++k) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(cov.R[static_cast<std::size_t>(k)]);
        const double lambda = std::max(es.eigenvalues()(M - 1), 0.0);
        CVector w = std::sqrt(lambda) * es.eigenvectors().col(M - 1);
        const Complex proj = b0.dot(w); // b0^H w
        if (std::abs(proj) > 0.0) w *= std::conj(proj) / std::abs(proj);
        W.col(k) = w;
    }
    return W;
}

// Re-balances per-user powers of fixed beam directions so the targets hold,
// staying as close as possible (L1) to the powers of W. Returns false when the
// small LP has no usable solution.
bool polish_powers(CMatrix& W, const ChannelSet& channels, const ArrayGeometry& geometry,
                   const ExtractionTargets& targets)
{
    const int K = static_cast<int>(W.cols());
    RVector lambda(K);
    CMatrix U = W;
    for (int k = 0; k < K; ++k) {
        lambda(k) = W.col(k).squaredNorm();
        if (!(lambda(k) > 0.0)) return false;
        U.col(k) /= std::sqrt(lambda(k));
    }
    const CMatrix HU = channels.H.adjoint() * U; // (k, j) = h_k^H u_j
    const CVector b0 = steering_vector(geometry, 0.0, targets.target_angle_rad);
    const bool sinr = targets.min_sinr > 0.0;
    const bool gain = targets.target_gain_mw > 0.0;
    const double margin = 1.0 + 1e-7;

    // variables: p (K), t (K), slacks
    const int slacks = 1 + (sinr ? K : 0) + 2 * K;
    const int n = 2 * K + slacks;
    const int m = slacks + (gain ? 1 : 0);
    conic::Problem prob;
    prob.cones.nonneg = n;
    prob.A = RMatrix::Zero(m, n);
    prob.b = RVector::Zero(m);
    prob.c = RVector::Zero(n);
    int row = 0;
    int slack = 2 * K;
    for (int k = 0; k < K; ++k) prob.A(row, k) = 1.0;
    prob.A(row, slack++) = 1.0;
    prob.b(row++) = targets.max_power_mw * (1.0 - 1e-9);
    if (sinr) {
        const double g = targets.min_sinr * margin;
        for (int k = 0; k < K; ++k) {
            for (int j = 0; j < K; ++j) prob.A(row, j) = j == k ? std::norm(HU(k, k)) : -g * std::norm(HU(k, j));
            prob.A(row, slack++) = -1.0;
            prob.b(row++) = g * targets.noise_power_mw;
        }
    }
    for (int k = 0; k < K; ++k) {
        prob.A(row, k) = 1.0;
        prob.A(row, K + k) = -1.0;
        prob.A(row, slack++) = 1.0;
        prob.b(row++) = lambda(k);
        prob.A(row, k) = -1.0;
        prob.A(row, K + k) = -1.0;
        prob.A(row, slack++) = 1.0;
        prob.b(row++) = -lambda(k);
    }
    if (gain) {
        for (int k = 0; k < K; ++k) prob.A(row, k) = std::norm(b0.dot(U.col(k)));
        prob.b(row++) = targets.target_gain_mw;
    }
    for (int k = 0; k < K; ++k) prob.c(K + k) = 1.0 / targets.max_power_mw;

    conic::Options opts;
    opts.relative_gap = 1e-9;
    opts.feasibility_tol = 1e-10;
    const conic::Solution sol = conic::solve(prob, opts);
    if (!sol.usable()) return false;
    for (int k = 0; k < K; ++k) W.col(k) = std::sqrt(std::max(sol.x(k), 0.0)) * U.col(k);
    if (targets.full_power && !gain) {
        const double power = W.squaredNorm();
        if (!(power > 0.0)) return false;
        W *= std::sqrt(targets.max_power_mw / power);
    }
    return true;
}

struct Candidate {
    bool feasible = false;
    double score = std::numeric_limits<double>::infinity();
    CMatrix W;
};

} // namespace

ExtractionResult extract_beamformers(const CovarianceSet& covariances, const ChannelSet& channels,
                                     const ArrayGeometry& geometry, const ExtractionTargets& targets,
                                     const BeamformerScore& score, double relaxation_value,
                                     const ExtractionOptions& options)
{
    const int K = covariances.num_users();
    if (K == 0) throw InvalidInputError("extract_beamformers: empty covariance set");
    if (targets.full_power && targets.target_gain_mw > 0.0)
        throw InvalidInputError("extract_beamformers: full_power cannot be combined with a gain target");
    const Eigen::Index M = covariances.R.front().rows();
    if (M != geometry.num_antennas || channels.num_users() != K)
        throw DimensionError("extract_beamformers: covariances do not match geometry/channels");

    ExtractionResult out;
    auto& diag = out.diagnostics;
    diag.relaxation_value = relaxation_value;
    bool all_rank_one = true;
    for (const auto& R : covariances.R) {
        diag.eigen_ratios.push_back(dominant_eigen_ratio(R));
        if (diag.eigen_ratios.back() < options.rank_one_threshold) all_rank_one = false;
    }

    const CVector b0 = steering_vector(geometry, 0.0, targets.target_angle_rad);
    if (all_rank_one) {
        out.W = principal_beamformers(covariances, b0);
        diag.method = "eigen";
        // Truncating a numerically rank-one block can shave the SINR or gain
        // just past tolerance; re-balance the user powers in that case.
        if (!meets_targets(out.W, channels, geometry, targets, 1e-6, options.sinr_slack, 1e-3)) {
            CMatrix polished = out.W;
            if (polish_powers(polished, channels, geometry, targets) &&
                meets_targets(polished, channels, geometry, targets, 1e-6, options.sinr_slack, 1e-3)) {
                out.W = std::move(polished);
                diag.method = "eigen+power";
            }
        }
        if (meets_targets(out.W, channels, geometry, targets, 1e-6, options.sinr_slack, 1e-3)) {
            diag.rank_one = true;
            diag.score = score(out.W);
            diag.relaxation_gap = diag.score - relaxation_value;
            return out;
        }
        diag.method.clear();
    }

    // Square-root factors R_k = L_k L_k^H.
    std::vector<CMatrix> factors;
    for (const auto& R : covariances.R) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(R);
        factors.push_back(es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal());
    }

    const int n = std::max(options.randomizations, 0);
    std::vector<Candidate> cands(static_cast<std::size_t>(n));
    auto draw = [&](int idx) {
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(idx)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        CMatrix W(M, K);
        for (int k = 0; k < K; ++k) {
            CVector g(M);
            for (Eigen::Index m = 0; m < M; ++m) g(m) = Complex(normal(rng), normal(rng));
            W.col(k) = factors[static_cast<std::size_t>(k)] * g;
        }
        const double power = W.squaredNorm();
        if (!(power > 0.0)) return;
        double s = std::sqrt(targets.max_power_mw / power);
        if (targets.target_gain_mw > 0.0) {
            const double g = target_gain(W, geometry, 0.0, targets.target_angle_rad);
            if (g > 0.0) s = std::min(s, std::sqrt(targets.target_gain_mw / g));
        }
        W *= s;
        Candidate& c = cands[static_cast<std::size_t>(idx)];
        if (!meets_targets(W, channels, geometry, targets, 1e-9, options.sinr_slack, options.gain_tolerance)) {
            if (!options.power_control || !polish_powers(W, channels, geometry, targets)) return;
            if (!meets_targets(W, channels, geometry, targets, 1e-9, options.sinr_slack, options.gain_tolerance))
                return;
        }
        c.feasible = true;
        c.score = score(W);
        c.W = std::move(W);
    };

    int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, std::max(n, 1));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) draw(i);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (int i = t; i < n; i += threads) draw(i);
            });
        for (auto& th : pool) th.join();
    }

    diag.candidates_drawn = n;
    int best = -1;
    for (int i = 0; i < n; ++i) {
        const Candidate& c = cands[static_cast<std::size_t>(i)];
        if (!c.feasible) continue;
        ++diag.candidates_feasible;
        if (best < 0 || c.score < cands[static_cast<std::size_t>(best)].score) best = i;
    }
    if (best < 0) {
        std::ostringstream msg;
        msg << "extract_beamformers: none of " << n
            << " randomized candidates met the constraints; increase the number of randomizations"
            << " (SDR lower bound " << relaxation_value << ")";
        throw SolverError(msg.str());
    }
    out.W = std::move(cands[static_cast<std::size_t>(best)].W);
    diag.method = "randomization";
    diag.score = cands[static_cast<std::size_t>(best)].score;
    diag.relaxation_gap = diag.score - relaxation_value;
    return out;
}

} // namespace isac
