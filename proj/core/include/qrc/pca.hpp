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
#include <filesystem>
#include <span>

#include <Eigen/Dense>

#include "qrc/dataset.hpp"
#include "qrc/types.hpp"

namespace qrc {

// Mean-centered PCA basis fitted on training images.
struct PcaModel {
  RVector mean;           // per-pixel training mean
  Eigen::MatrixXd basis;  // columns v_1..v_k, orthonormal, descending variance
  RVector train_min;      // per-component projection extrema over the training set
  RVector train_max;
  RVector explained_variance;  // sample variance along each kept component
  double total_variance = 0.0; // sum over all components

  Eigen::Index components() const { return basis.cols(); }
  Eigen::Index input_dim() const { return basis.rows(); }

  RVector explained_variance_ratio() const { return explained_variance / total_variance; }
};

// Rows of `data` are samples. Uses the top right singular vectors of the centered
// matrix; each basis vector is sign-fixed so its largest-|entry| coordinate
// (lowest index on ties) is positive. Throws ConfigError when num_components
// exceeds the numerical rank of the centered data, and when train_min == train_max.
PcaModel fit_pca(const Eigen::MatrixXd& data, Eigen::Index num_components);
PcaModel fit_pca(const ImageDataset& train, Eigen::Index num_components);

// Full rotation: every right singular vector of the centered data (784 of them
// when there are at least 784 samples), null directions included. No spread
// check, since zero-variance directions are expected. Throws ConfigError on rank 0.
PcaModel fit_pca_rotation(const Eigen::MatrixXd& data);

// Images as a samples x 784 real matrix (bytes as 0..255).
Eigen::MatrixXd to_matrix(const ImageDataset& data);

// Coefficients c = V^T (x - mean).
RVector project(const PcaModel& pca, const RVector& x);
RVector project(const PcaModel& pca, std::span<const std::uint8_t> image);

// Projections of every image, samples x components.
Eigen::MatrixXd project_all(const PcaModel& pca, const ImageDataset& data);

std::uint64_t pca_hash(const PcaModel& pca);

void save_pca(const std::filesystem::path& path, const PcaModel& pca);
PcaModel load_pca(const std::filesystem::path& path);

}  // namespace qrc
