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

#include "isac/types.hpp"

namespace isac {

/// Real coordinates of an n x n Hermitian matrix: the n diagonal entries,
/// then sqrt(2) Re U_ij and sqrt(2) Im U_ij for each i < j (row-major).
/// hvec(U) . hvec(V) == Re tr(U V) for Hermitian U, V.
inline int hvec_size(int n) { return n * n; }

RVector hvec(const CMatrix& U);
void hvec_into(const CMatrix& U, Eigen::Ref<RVector> out);
CMatrix hmat(const Eigen::Ref<const RVector>& v, int n);

/// Row of coefficients a with a . hvec(R) == Re tr(C R) for Hermitian R and
/// arbitrary complex C (only the Hermitian part of C contributes).
RVector hvec_functional(const CMatrix& C);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMatrix& U);

} // namespace isac
