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

#include "isac/qsdp.hpp"
#include "isac/hermitian.hpp"

#include <algorithm>
#include <cstdlib>
#include <cmath>
#include <sstream>

namespace isac {

void DesignConstraints::validate(int num_antennas) const
{
    if (!(max_power_mw > 0.0)) throw InvalidInputError("constraints: power budget must be positive");
    if (!(min_sinr > 0.0)) throw InvalidInputError("constraints: SINR target must be positive");
    if (!(target_gain_mw > 0.0)) throw InvalidInputError("constraints: target gain must be positive");
    if (!(noise_power_mw > 0.0)) throw InvalidInputError("constraints: noise power must be positive");
    if (target_gain_mw > max_power_mw * num_antennas * (1.0 + 1e-12))
        throw InfeasibleError("constraints: target gain exceeds the largest achievable gain P_t * M");
}

CMatrix CovarianceSet::total() const
{
    if (R.empty()) return CMatrix();
    CMatrix sum = CMatrix::Zero(R.front().rows(), R.front().cols());
    for (const auto& r : R) sum += r;
    return sum;
}

CovarianceSet CovarianceSet::from_beamformer(const CMatrix& W)
{
    CovarianceSet set;
    for (Eigen::Index k = 0; k < W.cols(); ++k) set.R.push_back(W.col(k) * W.col(k).adjoint());
    return set;
}

SdrModel::SdrModel(int num_antennas, int num_users, int num_scalars) : M_(num_antennas), K_(num_users), S_(num_scalars)
{
    if (M_ < 1 || K_ < 1 || S_ < 0) throw InvalidInputError("SdrModel: invalid dimensions");
}

void SdrModel::add_block_term(RVector& form, int k, const CMatrix& C) const
{
    if (C.rows() != M_ || C.cols() != M_) throw DimensionError("SdrModel: coefficient matrix must be M x M");
    form.segment(block_offset(k), M_ * M_) += hvec_functional(C);
}

void SdrModel::add_total_term(RVector& form, const CMatrix& C) const
{
    const RVector f = hvec_functional(C);
    for (int k = 0; k < K_; ++k) form.segment(block_offset(k), M_ * M_) += f;
}

void SdrModel::add_constraint(RVector form, Sense sense, double rhs, std::string label)
{
    if (form.size() != dimension()) throw DimensionError("SdrModel: constraint form has wrong length");
    rows_.push_back(Row{std::move(form), sense, rhs, std::move(label)});
}

void SdrModel::minimize(RVector form)
{
    if (form.size() != dimension()) throw DimensionError("SdrModel: objective has wrong length");
    objective_ = Objective::linear;
    linear_ = std::move(form);
    sign_ = 1.0;
}

void SdrModel::maximize(RVector form)
{
    minimize(-form);
    sign_ = -1.0;
}

void SdrModel::minimize_norm(RMatrix rows)
{
    if (rows.cols() != dimension()) throw DimensionError("SdrModel: norm rows have wrong width");
    objective_ = Objective::norm;
    norm_rows_ = std::move(rows);
}

void SdrModel::add_power_budget(double max_power_mw, bool equality)
{
    RVector f = zero_form();
    add_total_term(f, CMatrix::Identity(M_, M_));
    add_constraint(std::move(f), equality ? Sense::equal : Sense::less_equal, max_power_mw, "power");
}

void SdrModel::add_sinr_constraints(const ChannelSet& channels, double min_sinr, double noise_power_mw)
{
    if (channels.num_users() != K_ || channels.H.rows() != M_)
        throw DimensionError("SdrModel: channel set does not match the model");
    for (int k = 0; k < K_; ++k) {
        const CVector h = channels.h(k);
        const CMatrix hh = h * h.adjoint();
        // (1 + 1/Gamma) h^H R_k h - h^H R_W h >= sigma^2
        RVector f = zero_form();
        add_block_term(f, k, (1.0 + 1.0 / min_sinr) * hh);
        add_total_term(f, -hh);
        add_constraint(std::move(f), Sense::greater_equal, noise_power_mw, "sinr" + std::to_string(k));
    }
}

void SdrModel::add_gain_equality(const ArrayGeometry& geometry, double theta0, double gain_mw)
{
    const CVector b0 = steering_vector(geometry, 0.0, theta0);
    RVector f = zero_form();
    add_total_term(f, b0 * b0.adjoint());
    add_constraint(std::move(f), Sense::equal, gain_mw, "gain");
}

int SdrModel::count(const std::string& label_prefix) const
{
    return static_cast<int>(std::count_if(rows_.begin(), rows_.end(), [&](const Row& r) {
        return r.label.compare(0, label_prefix.size(), label_prefix) == 0;
    }));
}

namespace {

// Rows R' with ||R' v|| = ||C v|| for all v, dropping numerically null directions.
RMatrix compress_rows(const RMatrix& C)
{
    if (C.rows() == 0) return C;
    const double tol = 1e-13;
    if (C.rows() <= C.cols()) {
        RMatrix gram(C.rows(), C.rows());
        gram.setZero();
        gram.selfadjointView<Eigen::Lower>().rankUpdate(C);
        gram = gram.selfadjointView<Eigen::Lower>();
        Eigen::SelfAdjointEigenSolver<RMatrix> es(gram);
        const RVector& ev = es.eigenvalues();
        const double top = std::max(ev.maxCoeff(), 0.0);
        std::vector<int> keep;
        for (int i = 0; i < ev.size(); ++i)
            if (ev(i) > tol * top && top > 0.0) keep.push_back(i);
        RMatrix out(static_cast<Eigen::Index>(keep.size()), C.cols());
        for (std::size_t j = 0; j < keep.size(); ++j)
            out.row(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]).transpose() * C;
        return out;
    }
    RMatrix gram(C.cols(), C.cols());
    gram.setZero();
    gram.selfadjointView<Eigen::Lower>().rankUpdate(C.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    Eigen::SelfAdjointEigenSolver<RMatrix> es(gram);
    const RVector& ev = es.eigenvalues();
    const double top = std::max(ev.maxCoeff(), 0.0);
    std::vector<int> keep;
    for (int i = 0; i < ev.size(); ++i)
        if (ev(i) > tol * top && top > 0.0) keep.push_back(i);
    RMatrix out(static_cast<Eigen::Index>(keep.size()), C.cols());
    for (std::size_t j = 0; j < keep.size(); ++j)
        out.row(static_cast<Eigen::Index>(j)) = std::sqrt(ev(keep[j])) * es.eigenvectors().col(keep[j]).transpose();
    return out;
}

} // namespace

ConicProblem assemble(const SdrModel& model)
{
    ConicProblem out;
    const int M = model.num_antennas();
    const int K = model.num_users();
    const int S = model.num_scalars();
    out.num_antennas = M;
    out.num_users = K;
    out.num_scalars = S;
    out.psd_orders.assign(static_cast<std::size_t>(K), M);
    out.sinr_constraints = model.count("sinr");
    out.power_constraints = model.count("power");
    out.gain_equalities = model.count("gain");

    int slacks = 0;
    for (const auto& r : model.constraints())
        if (r.sense != SdrModel::Sense::equal) ++slacks;
    out.slack_count = slacks;

    RMatrix norm_rows;
    if (model.objective_kind() == SdrModel::Objective::norm) {
        out.norm_rows_original = static_cast<int>(model.norm_rows().rows());
        norm_rows = compress_rows(model.norm_rows());
        out.norm_rows_compressed = static_cast<int>(norm_rows.rows());
    }

    auto& cones = out.conic.cones;
    cones.nonneg = S + slacks;
    if (model.objective_kind() == SdrModel::Objective::norm) cones.soc = {1 + out.norm_rows_compressed};
    cones.hpsd = out.psd_orders;
    const int n = cones.dimension();
    const int psd0 = cones.hpsd_offset(0);

    auto place = [&](const RVector& form, Eigen::Ref<RVector> row) {
        row.head(S) += form.head(S);
        row.segment(psd0, K * M * M) += form.tail(K * M * M);
    };

    const int m = static_cast<int>(model.constraints().size()) + out.norm_rows_compressed;
    out.conic.A = RMatrix::Zero(m, n);
    out.conic.b = RVector::Zero(m);
    out.conic.c = RVector::Zero(n);

    int row = 0;
    int slack = S;
    for (const auto& r : model.constraints()) {
        RVector dense = RVector::Zero(n);
        place(r.form, dense);
        if (r.sense == SdrModel::Sense::less_equal) dense(slack++) = 1.0;
        if (r.sense == SdrModel::Sense::greater_equal) dense(slack++) = -1.0;
        out.conic.A.row(row) = dense.transpose();
        out.conic.b(row) = r.rhs;
        ++row;
    }

    if (model.objective_kind() == SdrModel::Objective::norm) {
        double scale = 0.0;
        for (Eigen::Index i = 0; i < norm_rows.rows(); ++i) scale = std::max(scale, norm_rows.row(i).norm());
        if (scale == 0.0) scale = 1.0;
        out.objective_scale = scale;
        const int t = cones.soc_offset(0);
        out.epigraph_index = t;
        for (Eigen::Index i = 0; i < norm_rows.rows(); ++i) {
            RVector dense = RVector::Zero(n);
            place(-norm_rows.row(i).transpose() / scale, dense);
            dense(t + 1 + static_cast<int>(i)) = 1.0;
            out.conic.A.row(row++) = dense.transpose();
        }
        out.conic.c(t) = 1.0;
    } else if (model.objective_kind() == SdrModel::Objective::linear) {
        const double scale = std::max(model.linear_objective().cwiseAbs().maxCoeff(), 1e-300);
        out.objective_scale = scale;
        out.objective_sign = model.objective_sign();
        RVector dense = RVector::Zero(n);
        place(model.linear_objective() / scale, dense);
        out.conic.c = dense;
    }
    return out;
}

std::string to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::near_optimal: return "near_optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::error: return "error";
    }
    return "error";
}

ConicSolution solve(const ConicProblem& problem, double relative_gap)
{
    conic::Options opts;
    opts.relative_gap = relative_gap;
    opts.verbose = std::getenv("ISAC_SOLVER_TRACE") != nullptr;
    const conic::Solution raw = conic::solve(problem.conic, opts);

    ConicSolution out;
    out.iterations = raw.iterations;
    out.relative_gap = raw.relative_gap;
    std::ostringstream diag;
    diag << "conic status " << conic::to_string(raw.status) << ", " << raw.iterations << " iterations, rel gap "
         << raw.relative_gap << ", pres " << raw.primal_residual << ", dres " << raw.dual_residual;
    if (!raw.message.empty()) diag << " (" << raw.message << ")";
    out.diagnostics = diag.str();

    switch (raw.status) {
    case conic::Status::optimal: out.status = SolveStatus::optimal; break;
    case conic::Status::near_optimal: out.status = SolveStatus::near_optimal; break;
    case conic::Status::primal_infeasible: out.status = SolveStatus::infeasible; return out;
    default: out.status = SolveStatus::error; return out;
    }

    const int M = problem.num_antennas;
    for (int k = 0; k < problem.num_users; ++k) {
        CMatrix R = hmat(raw.x.segment(problem.psd_offset(k), M * M), M);
        out.covariances.R.push_back(std::move(R));
    }
    out.scalars = raw.x.head(problem.num_scalars);
    out.objective = problem.objective_sign * problem.objective_scale * raw.primal_objective;
    return out;
}

RMatrix isl_objective_rows(const SdrModel& model, const ArrayGeometry& geometry, const CorrelationMatrix& corr,
                           const SidelobeMask& mask, double theta0, const AngleGrid& omega)
{
    const int K = model.num_users();
    const int P = omega.size();
    if (corr.num_users != K) throw DimensionError("isl_objective_rows: correlation matrix user count mismatch");
    if (P == 0) return RMatrix::Zero(0, model.dimension());

    // Gram of the masked autocorrelations, Gamma_ki = m_k^H m_i = F^H F.
    std::vector<CVector> m;
    for (int k = 0; k < K; ++k) m.push_back(masked_autocorrelation(corr, mask, k));
    CMatrix gram(K, K);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < K; ++i) gram(k, i) = m[static_cast<std::size_t>(k)].dot(m[static_cast<std::size_t>(i)]);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
    const RVector d = es.eigenvalues().cwiseMax(0.0);
    const CMatrix F = d.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();

    const CVector b0 = steering_vector(geometry, 0.0, theta0);
    const Complex I(0.0, 1.0);
    const int MM = model.num_antennas() * model.num_antennas();
    RMatrix rows = RMatrix::Zero(2 * K * P, model.dimension());
    for (int p = 0; p < P; ++p) {
        const CVector bp = steering_vector(geometry, 0.0, omega.angles[static_cast<std::size_t>(p)]);
        // a_k[p] = b0^H R_k bp = tr(R_k bp b0^H)
        const CMatrix C = bp * b0.adjoint();
        const RVector re = hvec_functional(C);
        const RVector im = hvec_functional(-I * C);
        for (int j = 0; j < K; ++j) {
            auto row_re = rows.row(2 * (j * P + p));
            auto row_im = rows.row(2 * (j * P + p) + 1);
            for (int i = 0; i < K; ++i) {
                const Complex f = F(j, i);
                const int off = model.block_offset(i);
                row_re.segment(off, MM) += (f.real() * re - f.imag() * im).transpose();
                row_im.segment(off, MM) += (f.imag() * re + f.real() * im).transpose();
            }
        }
    }
    return rows;
}

ConicProblem build_qsdp(const DesignConstraints& constraints, const ChannelSet& channels,
                        const ArrayGeometry& geometry, const CorrelationMatrix& corr, const SidelobeMask& mask,
                        const AngleGrid& omega)
{
    constraints.validate(geometry.num_antennas);
    SdrModel model(geometry.num_antennas, channels.num_users());
    model.add_power_budget(constraints.max_power_mw);
    model.add_sinr_constraints(channels, constraints.min_sinr, constraints.noise_power_mw);
    model.add_gain_equality(geometry, constraints.target_angle_rad, constraints.target_gain_mw);
    model.minimize_norm(isl_objective_rows(model, geometry, corr, mask, constraints.target_angle_rad, omega));
    return assemble(model);
}

} // namespace isac
