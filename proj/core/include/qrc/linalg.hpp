// Copyright 2026 The qrc-floquet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qrc/types.hpp"

namespace qrc::linalg {

// Complex Schur factorization A = Z T Z^H. For a normal matrix T is diagonal
// up to rounding, so Z is an orthonormal eigenbasis even across degenerate
// eigenvalues.
struct SchurResult {
  CMatrix vectors;            // Z, unitary
  CVector eigenvalues;        // diag(T)
  double offdiag_norm = 0.0;  // max |T_ij|, i < j
};

SchurResult complex_schur(const CMatrix& a);

struct HermitianEigenResult {
  CMatrix vectors;
  RVector values;  // ascending
};

// Eigendecomposition of a Hermitian matrix (upper triangle is referenced).
HermitianEigenResult hermitian_eigen(const CMatrix& h);

// max |U^H U - I|
double unitarity_error(const CMatrix& u);

// max |H - H^H|
double hermiticity_error(const CMatrix& h);

// exp(-i t H) for Hermitian H, via its own Hermitian eigendecomposition.
CMatrix exp_minus_i(const CMatrix& h, double t = 1.0);

// U^n by binary powering; n = 0 gives the identity.
CMatrix matrix_power(const CMatrix& u, unsigned n);

}  // namespace qrc::linalg
