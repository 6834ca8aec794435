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

// One-layer network: u = W^T x + B, softmax, cross-entropy, mini-batch
// gradient descent with optional inverted dropout on the input features.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qrc/dataset.hpp"
#include "qrc/types.hpp"

namespace qrc {

struct OnnModel {
  Eigen::MatrixXd weights;  // m x 10
  RVector bias;             // 10

  Eigen::Index input_dim() const { return weights.rows(); }

  static OnnModel zeros(Eigen::Index input_dim);
  // Uniform[-a, a] weights, zero bias. a = sqrt(6 / (m + 10)) when scale <= 0.
  static OnnModel random(Eigen::Index input_dim, std::uint64_t seed, double scale = 0.0);
};

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t batch_size = 100;
  int epochs = 300;
  double dropout = 0.0;
  std::uint64_t seed = 0;
  double init_scale = 0.0;  // <= 0 selects sqrt(6 / (m + 10))

  void validate(std::size_t dataset_size) const;
};

inline constexpr double kLogClamp = 1e-12;

// Softmax of W^T x + B with the max logit subtracted first.
RVector forward(const OnnModel& model, const RVector& x);

// Row-wise forward for a samples x m matrix.
RMatrix forward_batch(const OnnModel& model, const RMatrix& x);

// -log max(y[label], 1e-12)
double cross_entropy(const RVector& y, int label);

RVector one_hot(int label);
RMatrix one_hot_rows(std::span<const std::uint8_t> labels);

struct Gradients {
  Eigen::MatrixXd d_weights;  // m x 10
  RVector d_bias;             // 10
};

// Gradient of the batch-mean cross-entropy: dW = X^T (Y - T) / M, dB = colsum(Y - T) / M.
Gradients batch_gradients(const RMatrix& x, const RMatrix& y, const RMatrix& t);

// Zeroes each entry with probability `rate`, scales survivors by 1 / (1 - rate).
RVector apply_dropout(const RVector& x, double rate, std::mt19937_64& rng);
void apply_dropout_rows(RMatrix& x, double rate, std::mt19937_64& rng);

// Fraction of rows whose argmax (lowest index on ties) equals the label.
double evaluate(const OnnModel& model, const RMatrix& x, std::span<const std::uint8_t> labels);

double mean_loss(const OnnModel& model, const RMatrix& x, std::span<const std::uint8_t> labels);

struct EpochMetrics {
  int epoch = 0;  // 1-based
  double train_acc = 0.0;
  double test_acc = 0.0;
  double train_loss = 0.0;

  friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

struct TrainResult {
  OnnModel model;
  std::vector<EpochMetrics> history;
};

struct LabeledFeatures {
  const RMatrix& x;
  std::span<const std::uint8_t> labels;
};

// Seeded shuffle, batches of batch_size (short last batch kept), per-batch
// dropout masks, plain gradient steps. Metrics are measured on the clean model
// after each epoch. Throws TrainingDiverged on a non-finite loss.
TrainResult train(OnnModel model, LabeledFeatures train_set, LabeledFeatures test_set,
                  const TrainConfig& cfg);

struct WindowStats {
  double mean = 0.0;
  double std = 0.0;  // population std
  std::size_t count = 0;
};

// Statistics of a per-epoch metric over epochs [first, last] (1-based, clipped
// to the recorded range; the whole history when the window is empty).
WindowStats window_stats(const std::vector<EpochMetrics>& history, int first, int last,
                         const std::function<double(const EpochMetrics&)>& metric);

// train_acc - test_acc
double accuracy_gap(const EpochMetrics& m);

void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochMetrics>& history,
                       const std::string& comment = {});

// Binary checkpoint (m, 10, W row-major, B) plus `<path>.txt` with a free-form header.
void save_checkpoint(const std::filesystem::path& path, const OnnModel& model,
                     const std::string& sidecar_text);
OnnModel load_checkpoint(const std::filesystem::path& path);

}  // namespace qrc
