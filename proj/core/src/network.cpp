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

#include "qrc/network.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "qrc/error.hpp"
#include "qrc/linalg.hpp"

namespace qrc {

namespace {

constexpr double kUnitarityTolerance = 1e-9;
// A unitary has a diagonal Schur form; anything larger means the input was not normal.
constexpr double kSchurOffdiagTolerance = 1e-7;

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.precision(17);
  return out;
}

}  // namespace

EffectiveHamiltonian effective_hamiltonian(const CMatrix& floquet) {
  if (floquet.rows() != floquet.cols()) {
    throw ContractViolation("effective_hamiltonian: Floquet operator is not square");
  }
  const double u_err = linalg::unitarity_error(floquet);
  if (!(u_err < kUnitarityTolerance)) {
    throw ContractViolation("effective_hamiltonian: input is not unitary (max |F^H F - I| = " +
                            std::to_string(u_err) + ")");
  }

  const auto schur = linalg::complex_schur(floquet);
  if (schur.offdiag_norm > kSchurOffdiagTolerance) {
    throw NumericalError("effective_hamiltonian: Schur form is not diagonal (" +
                         std::to_string(schur.offdiag_norm) + ")");
  }

  RVector quasi(schur.eigenvalues.size());
  for (Eigen::Index k = 0; k < quasi.size(); ++k) {
    double theta = std::arg(schur.eigenvalues[k]);
    if (theta <= -std::numbers::pi) theta = std::numbers::pi;  // branch (-pi, pi]
    quasi[k] = -theta;
  }

  CMatrix h = schur.vectors * quasi.asDiagonal() * schur.vectors.adjoint();
  EffectiveHamiltonian out;
  out.matrix = 0.5 * (h + h.adjoint());
  return out;
}

std::vector<std::size_t> EffectiveNetwork::degrees() const {
  std::vector<std::size_t> deg(num_nodes, 0);
  for (const auto& e : edges) {
    ++deg[e.i];
    ++deg[e.j];
  }
  return deg;
}

EffectiveNetwork percolation_network(const EffectiveHamiltonian& h, double weight_floor) {
  const Eigen::Index n = h.dimension();
  const RVector energy = h.diag_energies();
  EffectiveNetwork net;
  net.num_nodes = static_cast<std::size_t>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Column i holds W_ji = conj(W_ij) contiguously.
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = std::abs(h.matrix(j, i));
      if (w > weight_floor && std::abs(energy[j] - energy[i]) < w) {
        net.edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), w});
      }
    }
  }
  return net;
}

DegreeHistogram degree_distribution(const EffectiveNetwork& net) {
  DegreeHistogram hist;
  for (std::size_t d : net.degrees()) ++hist[d];
  return hist;
}

PowerLawFit powerlaw_diagnostic(const DegreeHistogram& hist) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [k, count] : hist) {
    if (k >= 1 && count >= 1) {
      xs.push_back(std::log10(static_cast<double>(k)));
      ys.push_back(std::log10(static_cast<double>(count)));
    }
  }
  if (xs.size() < 3) {
    throw InsufficientData("powerlaw_diagnostic: need at least 3 nonzero bins with k >= 1, got " +
                           std::to_string(xs.size()));
  }

  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }

  PowerLawFit fit;
  fit.bins_used = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  // A flat histogram is fit exactly by the horizontal line.
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

void write_histogram_csv(const std::filesystem::path& path, const DegreeHistogram& hist,
                         const std::string& comment) {
  auto out = open_csv(path);
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "k,count\n";
  for (const auto& [k, count] : hist) out << k << ',' << count << '\n';
}

void write_edges_csv(const std::filesystem::path& path, const EffectiveNetwork& net,
                     const std::string& comment) {
  auto out = open_csv(path);
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "i,j,weight\n";
  for (const auto& e : net.edges) out << e.i << ',' << e.j << ',' << e.weight << '\n';
}

}  // namespace qrc
