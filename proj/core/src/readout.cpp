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

#include "qrc/readout.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "binary_io.hpp"
#include "qrc/error.hpp"

namespace qrc {

namespace {

constexpr char kFeatureMagic[9] = "QRCFEAT1";

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void ShotConfig::validate() const {
  if (mode == ShotMode::kSampled && shots < 1) throw ConfigError("shots must be >= 1 in sampled mode");
}

std::uint64_t sample_seed(std::uint64_t global_seed, std::uint64_t index) {
  return splitmix64(splitmix64(global_seed) ^ index);
}

RVector sample_frequencies(const RVector& probabilities, std::uint64_t shots, std::uint64_t seed) {
  if (shots < 1) throw ConfigError("sample_frequencies: shots must be >= 1");
  // Multinomial draw as a chain of conditional binomials.
  std::mt19937_64 rng(seed);
  RVector freq = RVector::Zero(probabilities.size());
  std::uint64_t remaining = shots;
  double mass = probabilities.sum();
  for (Eigen::Index i = 0; i < probabilities.size() && remaining > 0; ++i) {
    const double p = probabilities[i];
    std::uint64_t k = 0;
    if (i == probabilities.size() - 1 || p >= mass) {
      k = remaining;
    } else if (p > 0.0) {
      std::binomial_distribution<std::uint64_t> binom(remaining, std::clamp(p / mass, 0.0, 1.0));
      k = binom(rng);
    }
    freq[i] = static_cast<double>(k);
    remaining -= k;
    mass -= p;
  }
  return freq / static_cast<double>(shots);
}

RVector measure_distribution(const QuantumState& state, const ShotConfig& cfg,
                             std::uint64_t sample_index) {
  cfg.validate();
  RVector p = state.amplitudes().cwiseAbs2();
  if (cfg.mode == ShotMode::kExact) return p;
  return sample_frequencies(p, cfg.shots, sample_seed(cfg.seed, sample_index));
}

RVector standardize(const RVector& p) {
  const double n = static_cast<double>(p.size());
  if (p.size() == 0) return p;
  const double mean = p.sum() / n;
  const RVector centered = p.array() - mean;
  const double sd = std::sqrt(centered.squaredNorm() / n);
  if (sd < kDegenerateStd) return RVector::Zero(p.size());
  return centered / sd;
}

FeatureScaler FeatureScaler::fit(const RMatrix& train) {
  FeatureScaler s;
  const double n = static_cast<double>(train.rows());
  s.mean = train.colwise().mean().transpose();
  s.std.resize(train.cols());
  for (Eigen::Index c = 0; c < train.cols(); ++c) {
    s.std[c] = std::sqrt((train.col(c).array() - s.mean[c]).square().sum() / n);
  }
  return s;
}

void FeatureScaler::apply(RMatrix& x) const {
  if (x.cols() != mean.size()) throw ContractViolation("FeatureScaler: dimension mismatch");
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (std[c] < kDegenerateStd) {
      x.col(c).setZero();
    } else {
      x.col(c) = (x.col(c).array() - mean[c]) / std[c];
    }
  }
}

namespace {

void write_header(std::ostream& out, const FeatureHeader& h) {
  detail::write_magic(out, kFeatureMagic);
  detail::write_pod(out, h.key);
  detail::write_pod(out, h.num_samples);
  detail::write_pod(out, h.dim);
  detail::write_pod(out, static_cast<std::uint8_t>(h.mode));
  detail::write_pod(out, h.shots);
  detail::write_pod(out, h.seed);
  detail::write_pod(out, static_cast<std::uint8_t>(h.axis));
}

FeatureHeader read_header(std::istream& in, const std::filesystem::path& path) {
  detail::expect_magic(in, kFeatureMagic, path);
  FeatureHeader h;
  h.key = detail::read_pod<std::uint64_t>(in, path);
  h.num_samples = detail::read_pod<std::uint64_t>(in, path);
  h.dim = detail::read_pod<std::uint64_t>(in, path);
  h.mode = static_cast<ShotMode>(detail::read_pod<std::uint8_t>(in, path));
  h.shots = detail::read_pod<std::uint64_t>(in, path);
  h.seed = detail::read_pod<std::uint64_t>(in, path);
  h.axis = static_cast<StandardizeAxis>(detail::read_pod<std::uint8_t>(in, path));
  return h;
}

}  // namespace

void save_features(const std::filesystem::path& path, const FeatureMatrix& f) {
  if (static_cast<std::uint64_t>(f.x.rows()) != f.header.num_samples ||
      static_cast<std::uint64_t>(f.x.cols()) != f.header.dim || f.labels.size() != f.header.num_samples) {
    throw ContractViolation("save_features: header does not describe the matrix");
  }
  // Write to a sibling temp file and rename so readers never see a partial cache.
  auto tmp = path;
  tmp += ".partial";
  {
    auto out = detail::open_out(tmp);
    write_header(out, f.header);
    detail::write_array(out, std::span<const std::uint8_t>(f.labels));
    detail::write_array(out, std::span<const double>(f.x.data(), static_cast<std::size_t>(f.x.size())));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

FeatureHeader read_feature_header(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return read_header(in, path);
}

FeatureMatrix load_features(const std::filesystem::path& path, const FeatureHeader& expected) {
  auto in = detail::open_in(path);
  FeatureMatrix f;
  f.header = read_header(in, path);
  if (f.header.key != expected.key || f.header.dim != expected.dim ||
      (expected.num_samples != 0 && f.header.num_samples != expected.num_samples) ||
      f.header.mode != expected.mode || f.header.shots != expected.shots || f.header.seed != expected.seed ||
      f.header.axis != expected.axis) {
    throw CacheMismatch(path.string() + ": cached feature header (key " + std::to_string(f.header.key) +
                        ", dim " + std::to_string(f.header.dim) + ", samples " +
                        std::to_string(f.header.num_samples) +
                        ") does not match the requested configuration; delete the file or change cache_dir");
  }
  f.labels.resize(f.header.num_samples);
  detail::read_array(in, std::span<std::uint8_t>(f.labels), path);
  f.x.resize(static_cast<Eigen::Index>(f.header.num_samples), static_cast<Eigen::Index>(f.header.dim));
  detail::read_array(in, std::span<double>(f.x.data(), static_cast<std::size_t>(f.x.size())), path);
  return f;
}

void write_features_csv(const std::filesystem::path& path, const FeatureMatrix& f,
                        const std::string& comment) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.precision(17);
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "label";
  for (Eigen::Index c = 0; c < f.x.cols(); ++c) out << ",x" << c;
  out << '\n';
  for (Eigen::Index r = 0; r < f.x.rows(); ++r) {
    out << static_cast<int>(f.labels[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < f.x.cols(); ++c) out << ',' << f.x(r, c);
    out << '\n';
  }
}

}  // namespace qrc
