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

#include "qrc/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qrc/error.hpp"

namespace qrc {

double coefficient_to_angle(double c, double lo, double hi) {
  const double angle = std::numbers::pi * (c - lo) / (hi - lo);
  return std::clamp(angle, 0.0, std::numbers::pi);
}

EncodedSample encode_coefficients(const PcaModel& pca, const RVector& coefficients) {
  const Eigen::Index k = pca.components();
  if (k % 2 != 0) throw ContractViolation("encode: PCA model must have an even number of components");
  if (coefficients.size() != k) throw ContractViolation("encode: coefficient count mismatch");
  const Eigen::Index n = k / 2;
  EncodedSample enc;
  enc.thetas.resize(n);
  enc.phis.resize(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    enc.thetas[l] = coefficient_to_angle(coefficients[l], pca.train_min[l], pca.train_max[l]);
    enc.phis[l] =
        coefficient_to_angle(coefficients[n + l], pca.train_min[n + l], pca.train_max[n + l]);
  }
  return enc;
}

EncodedSample encode_angles(const PcaModel& pca, std::span<const std::uint8_t> image) {
  return encode_coefficients(pca, project(pca, image));
}

void product_amplitudes(const EncodedSample& enc, Eigen::Ref<CVector> out) {
  const int n = enc.num_qubits();
  if (enc.phis.size() != n) throw ContractViolation("prepare_state: theta/phi length mismatch");
  if (out.size() != (Eigen::Index{1} << n)) throw ContractViolation("prepare_state: output size");

  // Grow the tensor product one qubit at a time: qubit l doubles the filled prefix.
  out[0] = 1.0;
  for (int l = 0; l < n; ++l) {
    const complex a0(std::cos(0.5 * enc.thetas[l]), 0.0);
    const complex a1 = std::polar(std::sin(0.5 * enc.thetas[l]), enc.phis[l]);
    const Eigen::Index half = Eigen::Index{1} << l;
    for (Eigen::Index i = 0; i < half; ++i) {
      out[half + i] = out[i] * a1;
      out[i] *= a0;
    }
  }
}

QuantumState prepare_state(const EncodedSample& enc) {
  CVector amps(Eigen::Index{1} << enc.num_qubits());
  product_amplitudes(enc, amps);
  return QuantumState(std::move(amps));
}

}  // namespace qrc
