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

#include "qrc/linalg.hpp"

#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

#include "qrc/error.hpp"

namespace qrc::linalg {

SchurResult complex_schur(const CMatrix& a) {
  if (a.rows() != a.cols()) throw ContractViolation("complex_schur: matrix is not square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  SchurResult out;
  if (n == 0) return out;

  CMatrix t = a;
  out.vectors.resize(n, n);
  out.eigenvalues.resize(n);
  lapack_int sdim = 0;
  const lapack_int info = LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, t.data(), n, &sdim,
                                        out.eigenvalues.data(), out.vectors.data(), n);
  if (info != 0) {
    throw NumericalError("complex_schur: zgees failed with info=" + std::to_string(info));
  }
  double off = 0.0;
  for (lapack_int j = 1; j < n; ++j) {
    for (lapack_int i = 0; i < j; ++i) off = std::max(off, std::abs(t(i, j)));
  }
  out.offdiag_norm = off;
  return out;
}

HermitianEigenResult hermitian_eigen(const CMatrix& h) {
  if (h.rows() != h.cols()) throw ContractViolation("hermitian_eigen: matrix is not square");
  const lapack_int n = static_cast<lapack_int>(h.rows());
  HermitianEigenResult out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  if (n == 0) return out;
  // zheevr (MRRR); the divide-and-conquer driver returned non-orthogonal vectors
  // for n >= 512 with the distribution OpenBLAS/LAPACK builds.
  CMatrix work = h;
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'A', 'U', n, work.data(), n, 0.0, 0.0, 0, 0, 0.0, &found,
                     out.values.data(), out.vectors.data(), n, support.data());
  if (info != 0 || found != n) {
    throw NumericalError("hermitian_eigen: zheevr failed with info=" + std::to_string(info));
  }
  return out;
}

double unitarity_error(const CMatrix& u) {
  const CMatrix gram = u.adjoint() * u;
  return max_abs(gram - CMatrix::Identity(u.rows(), u.cols()));
}

double hermiticity_error(const CMatrix& h) { return max_abs(h - h.adjoint()); }

CMatrix exp_minus_i(const CMatrix& h, double t) {
  const auto eig = hermitian_eigen(h);
  CVector phases(eig.values.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases[k] = std::polar(1.0, -t * eig.values[k]);
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

CMatrix matrix_power(const CMatrix& u, unsigned n) {
  CMatrix result = CMatrix::Identity(u.rows(), u.cols());
  if (n == 0) return result;
  CMatrix base = u;
  bool first = true;
  while (true) {
    if (n & 1u) {
      if (first) {
        result = base;
        first = false;
      } else {
        result = (result * base).eval();
      }
    }
    n >>= 1u;
    if (n == 0) break;
    base = (base * base).eval();
  }
  return result;
}

}  // namespace qrc::linalg
