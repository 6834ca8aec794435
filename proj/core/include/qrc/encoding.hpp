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

#include <cstdint>
#include <span>

#include "qrc/dynamics.hpp"
#include "qrc/pca.hpp"

namespace qrc {

// Bloch angles for N qubits: qubit l is cos(theta_l/2)|0> + e^{i phi_l} sin(theta_l/2)|1>.
struct EncodedSample {
  RVector thetas;
  RVector phis;

  int num_qubits() const { return static_cast<int>(thetas.size()); }
};

// pi (c - lo) / (hi - lo), clamped to [0, pi].
double coefficient_to_angle(double c, double lo, double hi);

// Maps 2N PCA coefficients to angles: the first N become thetas, the next N phis.
EncodedSample encode_coefficients(const PcaModel& pca, const RVector& coefficients);

EncodedSample encode_angles(const PcaModel& pca, std::span<const std::uint8_t> image);

// Product state over qubits; qubit l is bit l of the basis index.
QuantumState prepare_state(const EncodedSample& enc);

// Same amplitudes written into a preallocated column of length 2^N.
void product_amplitudes(const EncodedSample& enc, Eigen::Ref<CVector> out);

}  // namespace qrc
