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

// M-layer: computational-basis measurement statistics of the evolved state,
// turned into a standardized classical feature vector.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qrc/dynamics.hpp"
#include "qrc/types.hpp"

namespace qrc {

enum class ShotMode : std::uint8_t { kExact = 0, kSampled = 1 };

struct ShotConfig {
  ShotMode mode = ShotMode::kExact;
  std::uint64_t shots = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Which axis the z-score runs over. kPerSample standardizes each sample's
// distribution across its 2^N outcomes; kPerFeature standardizes each outcome
// across the training set.
enum class StandardizeAxis : std::uint8_t { kPerSample = 0, kPerFeature = 1 };

// Seed for the sampled-mode draw of sample `index`.
std::uint64_t sample_seed(std::uint64_t global_seed, std::uint64_t index);

// Exact: |amplitude_i|^2. Sampled: relative frequencies of `shots` draws,
// seeded with sample_seed(cfg.seed, sample_index).
RVector measure_distribution(const QuantumState& state, const ShotConfig& cfg,
                             std::uint64_t sample_index = 0);

// Same for an already-computed probability vector.
RVector sample_frequencies(const RVector& probabilities, std::uint64_t shots, std::uint64_t seed);

inline constexpr double kDegenerateStd = 1e-15;

// (p - mean) / std with the population std; all zeros when std < 1e-15.
RVector standardize(const RVector& p);

// Per-feature z-score fitted on training rows.
struct FeatureScaler {
  RVector mean;
  RVector std;

  static FeatureScaler fit(const RMatrix& train);
  void apply(RMatrix& x) const;
};

// Cache file header for a feature matrix.
struct FeatureHeader {
  std::uint64_t key = 0;  // hash of everything that produced the matrix
  std::uint64_t num_samples = 0;
  std::uint64_t dim = 0;
  ShotMode mode = ShotMode::kExact;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  StandardizeAxis axis = StandardizeAxis::kPerSample;

  friend bool operator==(const FeatureHeader&, const FeatureHeader&) = default;
};

struct FeatureMatrix {
  FeatureHeader header;
  RMatrix x;  // num_samples x dim
  std::vector<std::uint8_t> labels;
};

void save_features(const std::filesystem::path& path, const FeatureMatrix& features);

FeatureHeader read_feature_header(const std::filesystem::path& path);

// Throws CacheMismatch when the stored header's key or dimension differ from `expected`.
FeatureMatrix load_features(const std::filesystem::path& path, const FeatureHeader& expected);

void write_features_csv(const std::filesystem::path& path, const FeatureMatrix& features,
                        const std::string& comment = {});

}  // namespace qrc
