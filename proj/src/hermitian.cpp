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

#include "isac/hermitian.hpp"

#include <cmath>

namespace isac {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

void hvec_into(const CMatrix& U, Eigen::Ref<RVector> out)
{
    const Eigen::Index n = U.rows();
    for (Eigen::Index i = 0; i < n; ++i) out(i) = U(i, i).real();
    Eigen::Index p = n;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            out(p++) = kSqrt2 * U(i, j).real();
            out(p++) = kSqrt2 * U(i, j).imag();
        }
}

RVector hvec(const CMatrix& U)
{
    if (U.rows() != U.cols()) throw DimensionError("hvec: matrix must be square");
    RVector v(U.rows() * U.rows());
    hvec_into(U, v);
    return v;
}

CMatrix hmat(const Eigen::Ref<const RVector>& v, int n)
{
    if (v.size() != static_cast<Eigen::Index>(n) * n) throw DimensionError("hmat: vector length must be n^2");
    CMatrix U(n, n);
    for (int i = 0; i < n; ++i) U(i, i) = Complex(v(i), 0.0);
    Eigen::Index p = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Complex z(v(p) / kSqrt2, v(p + 1) / kSqrt2);
            p += 2;
            U(i, j) = z;
            U(j, i) = std::conj(z);
        }
    return U;
}

RVector hvec_functional(const CMatrix& C)
{
    // Re tr(C R) = Re tr(S R) with S = (C + C^H)/2 Hermitian, and Re tr(S R) = hvec(S) . hvec(R).
    const CMatrix S = (C + C.adjoint()) / 2.0;
    return hvec(S);
}

double min_eigenvalue(const CMatrix& U)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(U, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

} // namespace isac
