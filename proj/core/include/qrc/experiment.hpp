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

// Experiment drivers behind the `qrc` subcommands. Every stage writes its
// outputs under run_dir and caches expensive intermediates (PCA basis,
// propagator, feature matrices) under cache_dir, keyed by content hashes.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qrc/dataset.hpp"
#include "qrc/dynamics.hpp"
#include "qrc/network.hpp"
#include "qrc/onn.hpp"
#include "qrc/pca.hpp"
#include "qrc/readout.hpp"

namespace qrc {

enum class Baseline { kNone, kOnn784, kEpsilonZero };

// "none", "onn784", "epsilon0"
Baseline parse_baseline(const std::string& name);
std::string to_string(Baseline baseline);

struct ExperimentConfig {
  DriveParameters drive;
  ShotConfig shots;
  TrainConfig train;
  StandardizeAxis axis = StandardizeAxis::kPerSample;

  std::filesystem::path mnist_dir = "data/mnist";
  std::size_t train_samples = 12000;  // 0 = full training set
  std::size_t test_samples = 2000;    // 0 = full test set
  std::uint64_t subsample_seed = 0;

  std::filesystem::path cache_dir = "cache";
  std::filesystem::path run_dir = "runs/default";

  std::vector<double> epsilons{0.0, 0.01, 0.03, 0.1};
  std::vector<unsigned> period_list{10, 25, 50, 75};
  std::vector<int> qubit_list{7, 9, 11};
  std::vector<double> dropout_list{0.0, 0.05, 0.10, 0.15};

  bool baseline_onn784 = false;
  bool baseline_epsilon_zero = false;
  bool export_edges = false;

  int window_first = 200;
  int window_last = 300;

  int pca_components() const { return 2 * drive.num_qubits; }
  void validate() const;
};

// Applies one `key=value` setting. Throws ConfigError on unknown keys or bad values.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Flat `key = value` file; `#` starts a comment.
ExperimentConfig load_config(const std::filesystem::path& path,
                             ExperimentConfig base = ExperimentConfig{});

struct ConfigKey {
  std::string name;
  std::string help;
};
const std::vector<ConfigKey>& config_keys();

std::string config_value(const ExperimentConfig& cfg, const std::string& key);

// Every key except output locations, one `key=value` per line, fixed order.
std::string canonical_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

struct PreparedData {
  ImageDataset train;
  ImageDataset test;
  std::uint64_t content_hash = 0;
};

// Loads the four standard MNIST files from mnist_dir and applies the stratified subsample.
PreparedData prepare_data(const ExperimentConfig& cfg);

// --- network -------------------------------------------------------------

struct NetworkSummary {
  double epsilon = 0.0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t max_degree = 0;
  std::size_t distinct_degrees = 0;  // distinct k >= 1
  std::optional<PowerLawFit> fit;    // empty when fewer than 3 usable bins
  DegreeHistogram histogram;
};

NetworkSummary analyze_network(const DriveParameters& drive);

// One histogram CSV per epsilon plus network/summary.csv. Throws ConfigError
// on an empty epsilon list.
std::vector<NetworkSummary> run_network(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// --- features ------------------------------------------------------------

struct FeatureSet {
  FeatureMatrix train;
  FeatureMatrix test;
  std::uint64_t key = 0;
  bool cache_hit = false;
};

// Quantum-layer features: encode, evolve by F^n, measure, standardize.
// F^n is computed once (or loaded from the propagator cache).
FeatureSet run_features(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Classical baseline: coefficients in the full PCA rotation, scaled by their global RMS.
FeatureSet run_classical_features(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Loads cached features without computing; throws ConfigError naming the
// `features` subcommand when the cache is missing.
FeatureSet load_cached_features(const ExperimentConfig& cfg, Baseline baseline);

// Cache key of the feature matrices for this configuration (needs the data
// for its content hash and the fitted PCA).
std::uint64_t feature_key(const ExperimentConfig& cfg, std::uint64_t data_hash, std::uint64_t pca_key,
                          Baseline baseline);

// Encoded-and-evolved probability rows for a set of images (exposed for tests).
RMatrix quantum_probabilities(const PcaModel& pca, const ImageDataset& images, const CMatrix& propagator,
                              const ShotConfig& shots, std::uint64_t index_offset);

// --- train / sweep -------------------------------------------------------

struct TrainOutcome {
  std::string label;
  TrainResult result;
  WindowStats train_acc;
  WindowStats test_acc;
  WindowStats gap;
};

// Trains on cached features (or builds them when build_features is set) and
// writes metrics_<label>.csv, model_<label>.bin and summary_<label>.json.
TrainOutcome run_train(const ExperimentConfig& cfg, Baseline baseline = Baseline::kNone,
                       bool build_features = false, const std::string& label = "train",
                       std::ostream* log = nullptr);

enum class SweepAxis { kEpsilon, kPeriods, kQubits, kDropout };

SweepAxis parse_sweep_axis(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepRow {
  std::string axis_value;
  TrainOutcome outcome;
};

// One row per sweep point (plus baseline rows when enabled), written to
// sweep_<axis>.csv and sweep_<axis>.json.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, SweepAxis axis, std::ostream* log = nullptr);

}  // namespace qrc
