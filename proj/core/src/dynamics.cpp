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

#include "qrc/dynamics.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "binary_io.hpp"
#include "qrc/error.hpp"
#include "qrc/linalg.hpp"

namespace qrc {

namespace {

constexpr double kHalfPeriod = 0.5;  // T1 = T2 = T/2 with T = 1

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void DriveParameters::validate() const {
  if (max_qubits < 1 || max_qubits > 20) {
    throw ConfigError("max_qubits must be in [1, 20], got " + std::to_string(max_qubits));
  }
  if (num_qubits < 1) throw ConfigError("num_qubits must be >= 1");
  if (num_qubits > max_qubits) {
    throw ConfigError("num_qubits=" + std::to_string(num_qubits) + " exceeds the dense-matrix cap of " +
                      std::to_string(max_qubits) + " qubits");
  }
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in [0, 1)");
  if (!std::isfinite(j0t)) throw ConfigError("j0t must be finite");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be > 0");
  if (!(disorder_width >= 0.0) || !std::isfinite(disorder_width)) {
    throw ConfigError("disorder_width must be >= 0");
  }
}

bool operator==(const DriveParameters& a, const DriveParameters& b) {
  return a.num_qubits == b.num_qubits && a.epsilon == b.epsilon && a.j0t == b.j0t &&
         a.alpha == b.alpha && a.periods == b.periods && a.disorder_width == b.disorder_width &&
         a.seed == b.seed;
}

QuantumState::QuantumState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  const auto n = static_cast<std::size_t>(amplitudes_.size());
  if (!is_power_of_two(n)) {
    throw ContractViolation("QuantumState: length " + std::to_string(n) + " is not a power of two");
  }
  const double norm = amplitudes_.norm();
  if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
    throw ContractViolation("QuantumState: norm " + std::to_string(norm) + " is not 1");
  }
  num_qubits_ = std::countr_zero(n);
}

QuantumState QuantumState::basis(int num_qubits, std::size_t index) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (index >= dim) throw ContractViolation("QuantumState::basis: index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return QuantumState(std::move(v));
}

std::vector<double> disorder_fields(const DriveParameters& params) {
  if (params.disorder_width == 0.0) return {};
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> dist(0.0, params.disorder_width);
  std::vector<double> fields(static_cast<std::size_t>(params.num_qubits));
  for (auto& d : fields) d = dist(rng);
  return fields;
}

double coupling(const DriveParameters& params, int l, int m) {
  return params.j0t / std::pow(static_cast<double>(std::abs(l - m)), params.alpha);
}

Eigen::Matrix2cd pulse_factor(double epsilon) {
  const double a = 0.5 * std::numbers::pi * (1.0 - epsilon);
  Eigen::Matrix2cd k;
  k << complex(std::cos(a), 0.0), complex(0.0, -std::sin(a)),  //
      complex(0.0, -std::sin(a)), complex(std::cos(a), 0.0);
  return k;
}

CMatrix build_u1(const DriveParameters& params) {
  params.validate();
  const Eigen::Matrix2cd k = pulse_factor(params.epsilon);

  CMatrix u = k;
  for (int q = 1; q < params.num_qubits; ++q) {
    // Qubit q is the more significant bit, so its factor goes on the left.
    CMatrix next = Eigen::kroneckerProduct(k, u);
    u = std::move(next);
  }
  return u;
}

CVector u2_phases(const DriveParameters& params) {
  params.validate();
  const int n = params.num_qubits;
  const auto fields = disorder_fields(params);

  std::vector<double> j;  // upper triangle, row-major over l < m
  j.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (int l = 0; l < n; ++l) {
    for (int m = l + 1; m < n; ++m) j.push_back(coupling(params, l, m));
  }

  const auto dim = static_cast<Eigen::Index>(params.dimension());
  CVector phases(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto z = [i](int l) { return ((i >> l) & 1) ? -1.0 : 1.0; };
    double energy = 0.0;
    std::size_t p = 0;
    for (int l = 0; l < n; ++l) {
      for (int m = l + 1; m < n; ++m) energy += j[p++] * z(l) * z(m);
    }
    for (int l = 0; l < static_cast<int>(fields.size()); ++l) energy += fields[l] * z(l);
    phases[i] = std::polar(1.0, -kHalfPeriod * energy);
  }
  return phases;
}

CMatrix build_u2(const DriveParameters& params) {
  const CVector phases = u2_phases(params);
  CMatrix u = CMatrix::Zero(phases.size(), phases.size());
  u.diagonal() = phases;
  return u;
}

CMatrix floquet_operator(const DriveParameters& params) {
  const CVector phases = u2_phases(params);
  return phases.asDiagonal() * build_u1(params);
}

CMatrix propagator(const DriveParameters& params) {
  return propagator(floquet_operator(params), params.periods);
}

CMatrix propagator(const CMatrix& floquet, unsigned periods) {
  return linalg::matrix_power(floquet, periods);
}

QuantumState evolve(const QuantumState& state, const CMatrix& propagator) {
  if (propagator.rows() != propagator.cols() ||
      static_cast<std::size_t>(propagator.cols()) != state.dimension()) {
    throw ContractViolation("evolve: propagator is " + std::to_string(propagator.rows()) + "x" +
                            std::to_string(propagator.cols()) + " but state has dimension " +
                            std::to_string(state.dimension()));
  }
  CVector out = propagator * state.amplitudes();
  const double norm = out.norm();
  if (!(std::abs(norm - 1.0) <= QuantumState::kNormTolerance)) {
    throw NumericalError("evolve: norm drifted to " + std::to_string(norm));
  }
  out /= norm;
  return QuantumState(std::move(out));
}

CMatrix evolve_batch(const CMatrix& states, const CMatrix& propagator) {
  if (propagator.rows() != propagator.cols() || propagator.cols() != states.rows()) {
    throw ContractViolation("evolve_batch: dimension mismatch");
  }
  CMatrix out = propagator * states;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double norm = out.col(c).norm();
    if (!(std::abs(norm - 1.0) <= QuantumState::kNormTolerance)) {
      throw NumericalError("evolve_batch: column " + std::to_string(c) + " norm drifted to " +
                           std::to_string(norm));
    }
    out.col(c) /= norm;
  }
  return out;
}

namespace {

constexpr char kPropagatorMagic[9] = "QRCPROP1";

void write_drive_header(std::ostream& out, const DriveParameters& p) {
  detail::write_pod<std::int32_t>(out, p.num_qubits);
  detail::write_pod(out, p.epsilon);
  detail::write_pod(out, p.j0t);
  detail::write_pod(out, p.alpha);
  detail::write_pod<std::uint32_t>(out, p.periods);
  detail::write_pod(out, p.disorder_width);
  detail::write_pod<std::uint64_t>(out, p.seed);
}

DriveParameters read_drive_header(std::istream& in, const std::filesystem::path& path) {
  DriveParameters p;
  p.num_qubits = detail::read_pod<std::int32_t>(in, path);
  p.epsilon = detail::read_pod<double>(in, path);
  p.j0t = detail::read_pod<double>(in, path);
  p.alpha = detail::read_pod<double>(in, path);
  p.periods = detail::read_pod<std::uint32_t>(in, path);
  p.disorder_width = detail::read_pod<double>(in, path);
  p.seed = detail::read_pod<std::uint64_t>(in, path);
  return p;
}

}  // namespace

void save_propagator(const std::filesystem::path& path, const DriveParameters& params,
                     const CMatrix& propagator) {
  if (static_cast<std::size_t>(propagator.rows()) != params.dimension() ||
      propagator.rows() != propagator.cols()) {
    throw ContractViolation("save_propagator: matrix shape does not match parameters");
  }
  auto out = detail::open_out(path);
  detail::write_magic(out, kPropagatorMagic);
  write_drive_header(out, params);
  detail::write_array(out, std::span<const complex>(propagator.data(),
                                                    static_cast<std::size_t>(propagator.size())));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CMatrix load_propagator(const std::filesystem::path& path, const DriveParameters& params) {
  auto in = detail::open_in(path);
  detail::expect_magic(in, kPropagatorMagic, path);
  const DriveParameters stored = read_drive_header(in, path);
  if (!(stored == params)) {
    throw CacheMismatch(path.string() + ": propagator header does not match the requested parameters");
  }
  const auto dim = static_cast<Eigen::Index>(params.dimension());
  CMatrix u(dim, dim);
  detail::read_array(in, std::span<complex>(u.data(), static_cast<std::size_t>(u.size())), path);
  return u;
}

}  // namespace qrc
