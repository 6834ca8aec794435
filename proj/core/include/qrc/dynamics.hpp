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

// Kicked long-range Ising drive: a global x rotation of angle (pi/2)(1 - epsilon)
// per qubit for half a period, then a power-law sigma^z sigma^z interaction
// for the other half. Units: hbar = 1, T = 1, T1 = T2 = 1/2, g T1 = pi/2.
//
// Basis convention: bit l of the index i (little-endian) is qubit l, and
// sigma^z |0> = +|0>.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qrc/types.hpp"

namespace qrc {

struct DriveParameters {
  int num_qubits = 11;
  double epsilon = 0.03;
  double j0t = 0.06;   // J0 * T
  double alpha = 1.51;
  unsigned periods = 50;
  double disorder_width = 0.0;  // onsite sigma^z fields drawn from Uniform[0, W]
  std::uint64_t seed = 0;
  int max_qubits = 12;  // dense-matrix guard: 2^N <= 2^max_qubits

  // Throws ConfigError on any out-of-range field.
  void validate() const;

  std::size_t dimension() const { return std::size_t{1} << num_qubits; }
};

bool operator==(const DriveParameters& a, const DriveParameters& b);

// Normalized amplitude vector over the 2^N computational basis states.
class QuantumState {
 public:
  static constexpr double kNormTolerance = 1e-10;

  // Throws ContractViolation unless the length is a power of two and the norm is 1.
  explicit QuantumState(CVector amplitudes);

  static QuantumState basis(int num_qubits, std::size_t index);

  const CVector& amplitudes() const { return amplitudes_; }
  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes_.size()); }

 private:
  CVector amplitudes_;
  int num_qubits_;
};

// Onsite fields D_l, empty when disorder_width == 0.
std::vector<double> disorder_fields(const DriveParameters& params);

// Coupling J_lm = j0t / |l - m|^alpha for l != m.
double coupling(const DriveParameters& params, int l, int m);

// Single-qubit factor K = [[cos a, -i sin a], [-i sin a, cos a]], a = (pi/2)(1 - epsilon).
// Accepts any epsilon; epsilon = 1 gives the identity.
Eigen::Matrix2cd pulse_factor(double epsilon);

// exp(-i H1 T1) = K (x) K (x) ... (x) K.
CMatrix build_u1(const DriveParameters& params);

// Diagonal of exp(-i H2 T2).
CVector u2_phases(const DriveParameters& params);

// exp(-i H2 T2) as a dense matrix; off-diagonal entries are exactly zero.
CMatrix build_u2(const DriveParameters& params);

// F = U2 * U1.
CMatrix floquet_operator(const DriveParameters& params);

// F^n with n = params.periods.
CMatrix propagator(const DriveParameters& params);

// Same as propagator() but reuses an already built Floquet operator.
CMatrix propagator(const CMatrix& floquet, unsigned periods);

// U |psi>, renormalized after checking the norm stayed within tolerance.
QuantumState evolve(const QuantumState& state, const CMatrix& propagator);

// Column-wise evolve for a batch of states stored as columns. Columns are
// renormalized; throws NumericalError if any column drifted beyond tolerance.
CMatrix evolve_batch(const CMatrix& states, const CMatrix& propagator);

// On-disk propagator cache: small header then raw little-endian complex doubles,
// column-major.
void save_propagator(const std::filesystem::path& path, const DriveParameters& params,
                     const CMatrix& propagator);

// Throws CacheMismatch if the stored header differs from params.
CMatrix load_propagator(const std::filesystem::path& path, const DriveParameters& params);

}  // namespace qrc
