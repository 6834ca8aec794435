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

// Effective-Hamiltonian network over computational basis states. Node i is
// |i>; an edge (i, j) is kept when the transition is resonant,
// |E_j - E_i| < |W_ij|, with E the diagonal and W the off-diagonal of H_eff.

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "qrc/types.hpp"

namespace qrc {

struct EffectiveHamiltonian {
  CMatrix matrix;  // Hermitian

  RVector diag_energies() const { return matrix.diagonal().real(); }
  complex offdiag(Eigen::Index i, Eigen::Index j) const { return matrix(i, j); }
  Eigen::Index dimension() const { return matrix.rows(); }
};

// H_eff = (i/T) log F on the principal branch: quasi-energies -theta with
// theta in (-pi, pi]. Requires F unitary within 1e-9.
EffectiveHamiltonian effective_hamiltonian(const CMatrix& floquet);

struct Edge {
  std::uint32_t i;
  std::uint32_t j;
  double weight;  // |W_ij|

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct EffectiveNetwork {
  std::size_t num_nodes = 0;
  std::vector<Edge> edges;  // sorted by (i, j), i < j

  std::vector<std::size_t> degrees() const;
};

inline constexpr double kDefaultWeightFloor = 1e-12;

EffectiveNetwork percolation_network(const EffectiveHamiltonian& h,
                                     double weight_floor = kDefaultWeightFloor);

// Degree -> number of nodes with that degree. Counts sum to num_nodes.
using DegreeHistogram = std::map<std::size_t, std::size_t>;

DegreeHistogram degree_distribution(const EffectiveNetwork& net);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t bins_used = 0;
};

// Least-squares line through (log10 k, log10 count) over bins with k >= 1.
// Throws InsufficientData with fewer than three such bins.
PowerLawFit powerlaw_diagnostic(const DegreeHistogram& hist);

void write_histogram_csv(const std::filesystem::path& path, const DegreeHistogram& hist,
                         const std::string& comment = {});
void write_edges_csv(const std::filesystem::path& path, const EffectiveNetwork& net,
                     const std::string& comment = {});

}  // namespace qrc
