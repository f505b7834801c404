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

#include "isac/conic.hpp"
#include "isac/hermitian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace isac::conic {

int ConeSpec::dimension() const
{
    int n = nonneg;
    for (int q : soc) n += q;
    for (int k : hpsd) n += k * k;
    return n;
}

int ConeSpec::degree() const
{
    return nonneg + static_cast<int>(soc.size()) + std::accumulate(hpsd.begin(), hpsd.end(), 0);
}

int ConeSpec::soc_offset(std::size_t cone) const
{
    int off = nonneg;
    for (std::size_t i = 0; i < cone; ++i) off += soc[i];
    return off;
}

int ConeSpec::hpsd_offset(std::size_t block) const
{
    int off = soc_offset(soc.size());
    for (std::size_t i = 0; i < block; ++i) off += hpsd[i] * hpsd[i];
    return off;
}

void Problem::validate() const
{
    const int n = cones.dimension();
    if (c.size() != n) throw DimensionError("conic problem: c does not match the cone dimension");
    if (A.cols() != n && A.rows() > 0) throw DimensionError("conic problem: A column count does not match the cones");
    if (A.rows() != b.size()) throw DimensionError("conic problem: A and b row counts differ");
    if (cones.nonneg < 0) throw DimensionError("conic problem: negative orthant size");
    for (int q : cones.soc)
        if (q < 1) throw DimensionError("conic problem: second-order cone dimension must be >= 1");
    for (int k : cones.hpsd)
        if (k < 1) throw DimensionError("conic problem: PSD block order must be >= 1");
    if (!c.allFinite() || !b.allFinite() || !A.allFinite()) throw InvalidInputError("conic problem: non-finite data");
}

std::string to_string(Status s)
{
    switch (s) {
    case Status::optimal: return "optimal";
    case Status::near_optimal: return "near_optimal";
    case Status::primal_infeasible: return "infeasible";
    case Status::dual_infeasible: return "unbounded";
    case Status::max_iterations: return "max_iterations";
    case Status::numerical_error: return "error";
    }
    return "error";
}

namespace {

using Seg = Eigen::Ref<const RVector>;
using SegOut = Eigen::Ref<RVector>;

struct SocScaling {
    double beta = 1.0;
    RVector v;
};

struct PsdScaling {
    CMatrix G;      // symmetric NT scaling, W(U) = G U G
    CMatrix Ginv;
    CMatrix Q;      // lambda = Q diag(lam) Q^H
    RVector lam;
};

// Nesterov-Todd scaling W with W(z) = W^{-1}(x) = lambda, one block per cone.
class Scaling {
public:
    explicit Scaling(const ConeSpec& cones) : cones_(cones) {}

    bool update(const RVector& x, const RVector& z)
    {
        lambda_.resize(x.size());
        const int l = cones_.nonneg;
        if (l > 0) {
            const auto xs = x.head(l).array();
            const auto zs = z.head(l).array();
            if ((xs <= 0.0).any() || (zs <= 0.0).any()) return false;
            lp_w_ = (xs / zs).sqrt().matrix();
            lambda_.head(l) = (xs * zs).sqrt().matrix();
        }
        soc_.resize(cones_.soc.size());
        for (std::size_t i = 0; i < cones_.soc.size(); ++i) {
            const int off = cones_.soc_offset(i);
            const int q = cones_.soc[i];
            const RVector xs = x.segment(off, q);
            const RVector zs = z.segment(off, q);
            const double xres = xs(0) * xs(0) - xs.tail(q - 1).squaredNorm();
            const double zres = zs(0) * zs(0) - zs.tail(q - 1).squaredNorm();
            if (!(xs(0) > 0.0) || !(zs(0) > 0.0) || !(xres > 0.0) || !(zres > 0.0)) return false;
            const double xn = std::sqrt(xres);
            const double zn = std::sqrt(zres);
            const RVector xb = xs / xn;
            RVector zb = zs / zn;
            const double gamma = std::sqrt((1.0 + xb.dot(zb)) / 2.0);
            zb.tail(q - 1) *= -1.0; // J zbar
            RVector wb = (xb + zb) / (2.0 * gamma);
            SocScaling s;
            s.beta = std::sqrt(xn / zn);
            s.v = wb;
            s.v(0) += 1.0;
            s.v /= std::sqrt(2.0 * (wb(0) + 1.0));
            soc_[i] = std::move(s);
            lambda_.segment(off, q) = apply_soc(soc_[i], zs, false);
        }
        psd_.resize(cones_.hpsd.size());
        for (std::size_t i = 0; i < cones_.hpsd.size(); ++i) {
            const int off = cones_.hpsd_offset(i);
            const int k = cones_.hpsd[i];
            const CMatrix X = hmat(x.segment(off, k * k), k);
            const CMatrix Z = hmat(z.segment(off, k * k), k);
            Eigen::LLT<CMatrix> llt(X);
            if (llt.info() != Eigen::Success) return false;
            const CMatrix L = llt.matrixL();
            CMatrix LZL = L.adjoint() * Z * L;
            LZL = (LZL + LZL.adjoint()).eval() / 2.0;
            Eigen::SelfAdjointEigenSolver<CMatrix> e1(LZL);
            if (e1.info() != Eigen::Success || e1.eigenvalues()(0) <= 0.0) return false;
            const CMatrix LU = L * e1.eigenvectors();
            CMatrix W = LU * e1.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * LU.adjoint();
            W = (W + W.adjoint()).eval() / 2.0;
            Eigen::SelfAdjointEigenSolver<CMatrix> e2(W);
            if (e2.info() != Eigen::Success || e2.eigenvalues()(0) <= 0.0) return false;
            PsdScaling s;
            const RVector root = e2.eigenvalues().cwiseSqrt();
            s.G = e2.eigenvectors() * root.asDiagonal() * e2.eigenvectors().adjoint();
            s.Ginv = e2.eigenvectors() * root.cwiseInverse().asDiagonal() * e2.eigenvectors().adjoint();
            CMatrix lam = s.G * Z * s.G;
            lam = (lam + lam.adjoint()).eval() / 2.0;
            Eigen::SelfAdjointEigenSolver<CMatrix> e3(lam);
            if (e3.info() != Eigen::Success || e3.eigenvalues()(0) <= 0.0) return false;
            s.Q = e3.eigenvectors();
            s.lam = e3.eigenvalues();
            hvec_into(lam, lambda_.segment(off, k * k));
            psd_[i] = std::move(s);
        }
        return true;
    }

    const RVector& lambda() const { return lambda_; }

    RVector apply(const RVector& u, bool inverse) const
    {
        RVector out(u.size());
        const int l = cones_.nonneg;
        if (l > 0) {
            if (inverse)
                out.head(l) = u.head(l).cwiseQuotient(lp_w_);
            else
                out.head(l) = u.head(l).cwiseProduct(lp_w_);
        }
        for (std::size_t i = 0; i < soc_.size(); ++i) {
            const int off = cones_.soc_offset(i);
            out.segment(off, cones_.soc[i]) = apply_soc(soc_[i], u.segment(off, cones_.soc[i]), inverse);
        }
        for (std::size_t i = 0; i < psd_.size(); ++i) {
            const int off = cones_.hpsd_offset(i);
            const int k = cones_.hpsd[i];
            const CMatrix& S = inverse ? psd_[i].Ginv : psd_[i].G;
            hvec_into(S * hmat(u.segment(off, k * k), k) * S, out.segment(off, k * k));
        }
        return out;
    }

    // Rows of A W (W is self-adjoint), so that A W^2 A^T = T T^T.
    RMatrix right_multiply(const RMatrix& A) const
    {
        RMatrix T(A.rows(), A.cols());
        const int l = cones_.nonneg;
        if (l > 0) T.leftCols(l) = A.leftCols(l) * lp_w_.asDiagonal();
        for (std::size_t i = 0; i < soc_.size(); ++i) {
            const int off = cones_.soc_offset(i);
            const int q = cones_.soc[i];
            const auto& s = soc_[i];
            const RVector Av = A.middleCols(off, q) * s.v;
            auto Tb = T.middleCols(off, q);
            Tb = 2.0 * s.beta * Av * s.v.transpose();
            Tb.col(0) -= s.beta * A.col(off);
            Tb.rightCols(q - 1) += s.beta * A.middleCols(off + 1, q - 1);
        }
        for (std::size_t i = 0; i < psd_.size(); ++i) {
            const int off = cones_.hpsd_offset(i);
            const int k = cones_.hpsd[i];
            const CMatrix& G = psd_[i].G;
            for (Eigen::Index r = 0; r < A.rows(); ++r) {
                const RVector row = A.row(r).segment(off, k * k).transpose();
                if (row.isZero(0.0)) {
                    T.row(r).segment(off, k * k).setZero();
                    continue;
                }
                RVector tmp(k * k);
                hvec_into(G * hmat(row, k) * G, tmp);
                T.row(r).segment(off, k * k) = tmp.transpose();
            }
        }
        return T;
    }

    // Solves lambda o u = r.
    RVector lambda_inverse_product(const RVector& r) const
    {
        RVector u(r.size());
        const int l = cones_.nonneg;
        if (l > 0) u.head(l) = r.head(l).cwiseQuotient(lambda_.head(l));
        for (std::size_t i = 0; i < soc_.size(); ++i) {
            const int off = cones_.soc_offset(i);
            const int q = cones_.soc[i];
            const RVector lam = lambda_.segment(off, q);
            const RVector rr = r.segment(off, q);
            const double det = lam(0) * lam(0) - lam.tail(q - 1).squaredNorm();
            const double u0 = (lam(0) * rr(0) - lam.tail(q - 1).dot(rr.tail(q - 1))) / det;
            u(off) = u0;
            u.segment(off + 1, q - 1) = (rr.tail(q - 1) - u0 * lam.tail(q - 1)) / lam(0);
        }
        for (std::size_t i = 0; i < psd_.size(); ++i) {
            const int off = cones_.hpsd_offset(i);
            const int k = cones_.hpsd[i];
            const auto& s = psd_[i];
            CMatrix Rt = s.Q.adjoint() * hmat(r.segment(off, k * k), k) * s.Q;
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) Rt(a, b) *= 2.0 / (s.lam(a) + s.lam(b));
            hvec_into(s.Q * Rt * s.Q.adjoint(), u.segment(off, k * k));
        }
        return u;
    }

    // Largest alpha with lambda + alpha d in the cone (infinity when unbounded).
    double max_step(const RVector& d) const
    {
        double alpha = std::numeric_limits<double>::infinity();
        const int l = cones_.nonneg;
        for (int i = 0; i < l; ++i)
            if (d(i) < 0.0) alpha = std::min(alpha, -lambda_(i) / d(i));
        for (std::size_t i = 0; i < soc_.size(); ++i) {
            const int off = cones_.soc_offset(i);
            const int q = cones_.soc[i];
            const RVector lam = lambda_.segment(off, q);
            const RVector dd = d.segment(off, q);
            const double a = dd(0) * dd(0) - dd.tail(q - 1).squaredNorm();
            const double b = lam(0) * dd(0) - lam.tail(q - 1).dot(dd.tail(q - 1));
            const double c = lam(0) * lam(0) - lam.tail(q - 1).squaredNorm();
            alpha = std::min(alpha, smallest_positive_root(a, b, c));
            if (dd(0) < 0.0) alpha = std::min(alpha, -lam(0) / dd(0));
        }
        for (std::size_t i = 0; i < psd_.size(); ++i) {
            const int off = cones_.hpsd_offset(i);
            const int k = cones_.hpsd[i];
            const auto& s = psd_[i];
            const RVector isq = s.lam.cwiseSqrt().cwiseInverse();
            CMatrix Dt = isq.asDiagonal() * (s.Q.adjoint() * hmat(d.segment(off, k * k), k) * s.Q) * isq.asDiagonal();
            Dt = (Dt + Dt.adjoint()).eval() / 2.0;
            const double emin = min_eigenvalue(Dt);
            if (emin < 0.0) alpha = std::min(alpha, -1.0 / emin);
        }
        return alpha;
    }

private:
    RVector apply_soc(const SocScaling& s, const Seg& u, bool inverse) const
    {
        const Eigen::Index q = u.size();
        RVector Ju = u;
        Ju.tail(q - 1) *= -1.0;
        if (!inverse) return s.beta * (2.0 * s.v * s.v.dot(u) - Ju);
        RVector Jv = s.v;
        Jv.tail(q - 1) *= -1.0;
        return (2.0 * Jv * Jv.dot(u) - Ju) / s.beta;
    }

    static double smallest_positive_root(double a, double b, double c)
    {
        // a t^2 + 2 b t + c with c > 0
        const double inf = std::numeric_limits<double>::infinity();
        if (a == 0.0) return b < 0.0 ? -c / (2.0 * b) : inf;
        const double disc = b * b - a * c;
        if (disc < 0.0) return inf;
        const double sq = std::sqrt(disc);
        const double qq = -(b + (b >= 0.0 ? sq : -sq));
        double best = inf;
        for (double r : {qq / a, qq != 0.0 ? c / qq : inf})
            if (r > 0.0) best = std::min(best, r);
        return best;
    }

    const ConeSpec& cones_;
    RVector lp_w_;
    std::vector<SocScaling> soc_;
    std::vector<PsdScaling> psd_;
    RVector lambda_;
};

RVector identity(const ConeSpec& cones)
{
    RVector e = RVector::Zero(cones.dimension());
    e.head(cones.nonneg).setOnes();
    for (std::size_t i = 0; i < cones.soc.size(); ++i) e(cones.soc_offset(i)) = 1.0;
    for (std::size_t i = 0; i < cones.hpsd.size(); ++i) {
        const int off = cones.hpsd_offset(i);
        e.segment(off, cones.hpsd[i]).setOnes();
    }
    return e;
}

RVector jordan(const ConeSpec& cones, const RVector& a, const RVector& b)
{
    RVector out(a.size());
    const int l = cones.nonneg;
    out.head(l) = a.head(l).cwiseProduct(b.head(l));
    for (std::size_t i = 0; i < cones.soc.size(); ++i) {
        const int off = cones.soc_offset(i);
        const int q = cones.soc[i];
        out(off) = a.segment(off, q).dot(b.segment(off, q));
        out.segment(off + 1, q - 1) = a(off) * b.segment(off + 1, q - 1) + b(off) * a.segment(off + 1, q - 1);
    }
    for (std::size_t i = 0; i < cones.hpsd.size(); ++i) {
        const int off = cones.hpsd_offset(i);
        const int k = cones.hpsd[i];
        const CMatrix A = hmat(a.segment(off, k * k), k);
        const CMatrix B = hmat(b.segment(off, k * k), k);
        const CMatrix P = A * B;
        hvec_into((P + P.adjoint()) / 2.0, out.segment(off, k * k));
    }
    return out;
}

class SchurSolver {
public:
    bool factor(const RMatrix& H)
    {
        H_ = H;
        const Eigen::Index m = H.rows();
        if (m == 0) return true;
        const double reg = 1e-13 * std::max(1.0, H.diagonal().maxCoeff());
        llt_.compute(H + reg * RMatrix::Identity(m, m));
        return llt_.info() == Eigen::Success;
    }

    RVector solve(const RVector& r) const
    {
        if (r.size() == 0) return r;
        RVector u = llt_.solve(r);
        for (int it = 0; it < 2; ++it) u += llt_.solve(r - H_ * u);
        return u;
    }

private:
    RMatrix H_;
    Eigen::LLT<RMatrix> llt_;
};

struct Direction {
    RVector dx, dy, dz, dxs, dzs;
    double dtau = 0.0;
    double dkappa = 0.0;
};

} // namespace

Solution solve(const Problem& problem, const Options& options)
{
    problem.validate();
    const ConeSpec& cones = problem.cones;
    const int n = cones.dimension();
    const Eigen::Index m = problem.A.rows();
    const double nu = cones.degree();

    // Row equilibration of the equality constraints.
    RVector row_scale = RVector::Ones(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double nrm = problem.A.row(i).norm();
        if (nrm > 0.0) row_scale(i) = 1.0 / nrm;
    }
    const RMatrix A = row_scale.asDiagonal() * problem.A;
    const RVector b = row_scale.cwiseProduct(problem.b);
    const RVector& c = problem.c;
    const double norm_b = std::max(1.0, b.norm());
    const double norm_c = std::max(1.0, c.norm());

    const RVector e = identity(cones);
    RVector x = e, z = e, y = RVector::Zero(m);
    double tau = 1.0, kappa = 1.0;

    Solution sol;
    Scaling W(cones);
    SchurSolver schur;
    double best_merit = std::numeric_limits<double>::infinity();
    Solution best;
    bool scaled = false; // W already holds the scaling of (x, z)
    std::array<double, 4> best_scaled{}; // pres, dres, relgap, gap of best

    auto fill = [&](Solution& s) {
        s.x = x / tau;
        s.z = z / tau;
        s.y = row_scale.cwiseProduct(y / tau);
        s.primal_objective = c.dot(s.x);
        s.dual_objective = problem.b.dot(s.y);
        s.gap = s.x.dot(s.z);
        const double denom = std::max(std::abs(s.primal_objective), std::abs(s.dual_objective));
        s.relative_gap = denom > 0.0 ? s.gap / denom : std::numeric_limits<double>::infinity();
        s.primal_residual = m > 0 ? (problem.A * s.x - problem.b).norm() / std::max(1.0, problem.b.norm()) : 0.0;
        s.dual_residual = (m > 0 ? RVector(problem.A.transpose() * s.y + s.z - c) : RVector(s.z - c)).norm() / norm_c;
    };

    for (int iter = 0;; ++iter) {
        const RVector p = A * x - b * tau;
        const RVector d = A.transpose() * y + z - c * tau;
        const double g = c.dot(x) - b.dot(y) + kappa;
        const double mu = (x.dot(z) + tau * kappa) / (nu + 1.0);

        const double pres = p.norm() / tau / norm_b;
        const double dres = d.norm() / tau / norm_c;
        const double pcost = c.dot(x) / tau;
        const double dcost = b.dot(y) / tau;
        const double gap = x.dot(z) / (tau * tau);
        const double denom = std::max(std::abs(pcost), std::abs(dcost));
        const double relgap = denom > 0.0 ? gap / denom : std::numeric_limits<double>::infinity();
        if (options.verbose)
            std::fprintf(stderr, "%3d pcost %+.8e dcost %+.8e gap %.2e pres %.2e dres %.2e k/t %.2e\n", iter, pcost,
                         dcost, gap, pres, dres, kappa / tau);

        sol.iterations = iter;
        if (pres <= options.feasibility_tol && dres <= options.feasibility_tol &&
            (gap <= options.absolute_gap || relgap <= options.relative_gap)) {
            fill(sol);
            sol.status = Status::optimal;
            return sol;
        }
        const double merit = std::max({pres, dres, std::min(relgap, gap)});
        if (merit < best_merit) {
            best_merit = merit;
            fill(best);
            best.iterations = iter;
            best_scaled = {pres, dres, relgap, gap};
        }

        const double by = b.dot(y);
        const double cx = c.dot(x);
        if (kappa > tau) {
            if (by > 0.0 && (A.transpose() * y + z).norm() <= options.feasibility_tol * by) {
                sol.status = Status::primal_infeasible;
                sol.y = row_scale.cwiseProduct(y / by);
                sol.z = z / by;
                sol.message = "primal infeasibility certificate found";
                return sol;
            }
            if (cx < 0.0 && (A * x).norm() <= options.feasibility_tol * (-cx)) {
                sol.status = Status::dual_infeasible;
                sol.x = x / (-cx);
                sol.message = "dual infeasibility certificate found";
                return sol;
            }
        }

        auto give_up = [&](Status fallback, const char* why) {
            // Same (equilibrated) measures as the convergence test, 100x looser.
            const auto& [bp, bd, brel, bgap] = best_scaled;
            if (bp <= 100.0 * options.feasibility_tol && bd <= 100.0 * options.feasibility_tol &&
                (brel <= 100.0 * options.relative_gap || bgap <= 100.0 * options.absolute_gap)) {
                best.status = Status::near_optimal;
            } else {
                best.status = fallback;
            }
            best.message = why;
            return best;
        };

        if (iter >= options.max_iterations) return give_up(Status::max_iterations, "iteration limit reached");
        if (!scaled && !W.update(x, z)) return give_up(Status::numerical_error, "iterate left the cone interior");
        scaled = false;

        const RMatrix T = W.right_multiply(A);
        RMatrix H(m, m);
        H.setZero();
        H.selfadjointView<Eigen::Lower>().rankUpdate(T);
        H = H.selfadjointView<Eigen::Lower>();
        if (!schur.factor(H)) return give_up(Status::numerical_error, "Schur complement factorization failed");

        const RVector Wc = W.apply(c, false);
        const RVector W2c = W.apply(Wc, false);
        const RVector q = A * W2c;
        const double cWc = Wc.squaredNorm();
        const RVector u1 = schur.solve(q + b);
        const double coef = (q - b).dot(u1) - cWc - kappa / tau;
        const RVector W2d = W.apply(W.apply(d, false), false);
        const RVector& lam = W.lambda();
        const RVector lamlam = jordan(cones, lam, lam);

        auto newton = [&](double eta, double target, const RVector& corr, double corr_tau) {
            Direction dir;
            const RVector rc = target * e - lamlam - corr;
            const RVector rt = W.lambda_inverse_product(rc);
            const RVector Rx = W.apply(rt, false);
            const RVector rhs2 = -eta * p - eta * (A * W2d) - A * Rx;
            const RVector u2 = schur.solve(rhs2);
            const double num = -eta * g - (q - b).dot(u2) - eta * c.dot(W2d) - c.dot(Rx) -
                               (target - tau * kappa - corr_tau) / tau;
            dir.dtau = num / coef;
            dir.dy = u2 + dir.dtau * u1;
            dir.dz = -eta * d - A.transpose() * dir.dy + c * dir.dtau;
            dir.dx = -W.apply(W.apply(dir.dz, false), false) + Rx;
            dir.dkappa = (target - tau * kappa - corr_tau - kappa * dir.dtau) / tau;
            dir.dxs = W.apply(dir.dx, true);
            dir.dzs = W.apply(dir.dz, false);
            return dir;
        };
        auto step_to_boundary = [&](const Direction& dir) {
            double a = std::min(W.max_step(dir.dxs), W.max_step(dir.dzs));
            if (dir.dtau < 0.0) a = std::min(a, -tau / dir.dtau);
            if (dir.dkappa < 0.0) a = std::min(a, -kappa / dir.dkappa);
            return a;
        };

        const Direction aff = newton(1.0, 0.0, RVector::Zero(n), 0.0);
        const double alpha_aff = std::min(1.0, step_to_boundary(aff));
        const double sigma = std::pow(1.0 - alpha_aff, 3);
        const Direction dir = newton(1.0 - sigma, sigma * mu, jordan(cones, aff.dxs, aff.dzs), aff.dtau * aff.dkappa);
        double alpha = std::min(1.0, 0.99 * step_to_boundary(dir));
        if (!(alpha > 1e-12) || !dir.dx.allFinite())
            return give_up(Status::numerical_error, "step length collapsed");

        // Near the boundary the step can land just outside a cone in floating
        // point; back off until the new point can be scaled.
        for (int tries = 0;; ++tries) {
            const RVector xn = x + alpha * dir.dx;
            const RVector zn = z + alpha * dir.dz;
            const double taun = tau + alpha * dir.dtau;
            const double kappan = kappa + alpha * dir.dkappa;
            if (taun > 0.0 && kappan > 0.0 && W.update(xn, zn)) {
                x = xn;
                z = zn;
                y += alpha * dir.dy;
                tau = taun;
                kappa = kappan;
                scaled = true;
                break;
            }
            alpha *= 0.5;
            if (tries >= 30 || !(alpha > 1e-12)) return give_up(Status::numerical_error, "iterate left the cone interior");
        }
    }
}

} // namespace isac::conic
