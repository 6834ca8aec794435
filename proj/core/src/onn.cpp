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

#include "qrc/onn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "binary_io.hpp"
#include "qrc/error.hpp"

namespace qrc {

namespace {

constexpr char kCheckpointMagic[9] = "QRCONN01";

void softmax_rows(RMatrix& u) {
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    auto row = u.row(r);
    const double top = row.maxCoeff();
    row = (row.array() - top).exp();
    row /= row.sum();
  }
}

Eigen::Index argmax_lowest(const auto& row) {
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return best;
}

void check_labels(const RMatrix& x, std::span<const std::uint8_t> labels, const char* what) {
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw ContractViolation(std::string(what) + ": feature rows and labels differ in count");
  }
}

}  // namespace

OnnModel OnnModel::zeros(Eigen::Index input_dim) {
  return {Eigen::MatrixXd::Zero(input_dim, kNumClasses), RVector::Zero(kNumClasses)};
}

OnnModel OnnModel::random(Eigen::Index input_dim, std::uint64_t seed, double scale) {
  const double a = scale > 0.0 ? scale : std::sqrt(6.0 / static_cast<double>(input_dim + kNumClasses));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-a, a);
  OnnModel m = zeros(input_dim);
  for (Eigen::Index j = 0; j < m.weights.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.weights.rows(); ++i) m.weights(i, j) = dist(rng);
  }
  return m;
}

void TrainConfig::validate(std::size_t dataset_size) const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be finite and >= 0");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (batch_size > dataset_size) {
    throw ConfigError("batch_size " + std::to_string(batch_size) + " exceeds dataset size " +
                      std::to_string(dataset_size));
  }
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
}

RVector forward(const OnnModel& model, const RVector& x) {
  if (x.size() != model.input_dim()) throw ContractViolation("forward: input dimension mismatch");
  if (!x.allFinite()) throw ContractViolation("forward: non-finite input");
  RVector u = model.weights.transpose() * x + model.bias;
  u = (u.array() - u.maxCoeff()).exp();
  return u / u.sum();
}

RMatrix forward_batch(const OnnModel& model, const RMatrix& x) {
  if (x.cols() != model.input_dim()) throw ContractViolation("forward_batch: input dimension mismatch");
  RMatrix u = x * model.weights;
  u.rowwise() += model.bias.transpose();
  softmax_rows(u);
  return u;
}

double cross_entropy(const RVector& y, int label) {
  if (label < 0 || label >= y.size()) throw ContractViolation("cross_entropy: label out of range");
  return -std::log(std::max(y[label], kLogClamp));
}

RVector one_hot(int label) {
  if (label < 0 || label >= kNumClasses) throw ContractViolation("one_hot: label out of range");
  RVector t = RVector::Zero(kNumClasses);
  t[label] = 1.0;
  return t;
}

RMatrix one_hot_rows(std::span<const std::uint8_t> labels) {
  RMatrix t = RMatrix::Zero(static_cast<Eigen::Index>(labels.size()), kNumClasses);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] >= kNumClasses) throw ContractViolation("one_hot_rows: label out of range");
    t(static_cast<Eigen::Index>(r), labels[r]) = 1.0;
  }
  return t;
}

Gradients batch_gradients(const RMatrix& x, const RMatrix& y, const RMatrix& t) {
  if (x.rows() == 0 || y.rows() != x.rows() || t.rows() != x.rows() || y.cols() != t.cols()) {
    throw ContractViolation("batch_gradients: inconsistent shapes");
  }
  const double inv_m = 1.0 / static_cast<double>(x.rows());
  const RMatrix delta = (y - t) * inv_m;
  return {x.transpose() * delta, delta.colwise().sum().transpose()};
}

RVector apply_dropout(const RVector& x, double rate, std::mt19937_64& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ContractViolation("apply_dropout: rate must be in [0, 1)");
  if (rate == 0.0) return x;
  std::bernoulli_distribution drop(rate);
  const double keep_scale = 1.0 / (1.0 - rate);
  RVector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = drop(rng) ? 0.0 : x[i] * keep_scale;
  return out;
}

void apply_dropout_rows(RMatrix& x, double rate, std::mt19937_64& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ContractViolation("apply_dropout: rate must be in [0, 1)");
  if (rate == 0.0) return;
  std::bernoulli_distribution drop(rate);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = drop(rng) ? 0.0 : x(r, c) * keep_scale;
  }
}

double evaluate(const OnnModel& model, const RMatrix& x, std::span<const std::uint8_t> labels) {
  check_labels(x, labels, "evaluate");
  if (labels.empty()) return 0.0;
  const RMatrix y = forward_batch(model, x);
  std::size_t correct = 0;
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    if (argmax_lowest(y.row(r)) == labels[static_cast<std::size_t>(r)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double mean_loss(const OnnModel& model, const RMatrix& x, std::span<const std::uint8_t> labels) {
  check_labels(x, labels, "mean_loss");
  const RMatrix y = forward_batch(model, x);
  double total = 0.0;
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    total -= std::log(std::max(y(r, labels[static_cast<std::size_t>(r)]), kLogClamp));
  }
  return labels.empty() ? 0.0 : total / static_cast<double>(labels.size());
}

namespace {

struct Evaluation {
  double accuracy;
  double loss;
};

Evaluation evaluate_with_loss(const OnnModel& model, const RMatrix& x,
                              std::span<const std::uint8_t> labels) {
  const RMatrix y = forward_batch(model, x);
  std::size_t correct = 0;
  double total = 0.0;
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    const auto label = labels[static_cast<std::size_t>(r)];
    if (argmax_lowest(y.row(r)) == label) ++correct;
    total -= std::log(std::max(y(r, label), kLogClamp));
  }
  const double n = static_cast<double>(labels.size());
  return {labels.empty() ? 0.0 : static_cast<double>(correct) / n, labels.empty() ? 0.0 : total / n};
}

}  // namespace

TrainResult train(OnnModel model, LabeledFeatures train_set, LabeledFeatures test_set,
                  const TrainConfig& cfg) {
  check_labels(train_set.x, train_set.labels, "train");
  check_labels(test_set.x, test_set.labels, "train (test split)");
  cfg.validate(train_set.labels.size());
  if (train_set.x.cols() != model.input_dim() ||
      (test_set.x.rows() > 0 && test_set.x.cols() != model.input_dim())) {
    throw ContractViolation("train: feature dimension does not match the model");
  }

  const auto n = static_cast<Eigen::Index>(train_set.labels.size());
  const RMatrix targets = one_hot_rows(train_set.labels);

  std::mt19937_64 shuffle_rng(cfg.seed);
  std::mt19937_64 dropout_rng(cfg.seed ^ 0xd1b54a32d192ed03ULL);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));

  TrainResult result;
  result.history.reserve(static_cast<std::size_t>(cfg.epochs));
  const auto batch = static_cast<Eigen::Index>(cfg.batch_size);
  RMatrix xb;
  RMatrix tb;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index m = std::min(batch, n - start);
      xb.resize(m, train_set.x.cols());
      tb.resize(m, kNumClasses);
      for (Eigen::Index r = 0; r < m; ++r) {
        const Eigen::Index src = order[static_cast<std::size_t>(start + r)];
        xb.row(r) = train_set.x.row(src);
        tb.row(r) = targets.row(src);
      }
      apply_dropout_rows(xb, cfg.dropout, dropout_rng);

      const RMatrix yb = forward_batch(model, xb);
      const Gradients g = batch_gradients(xb, yb, tb);
      model.weights -= cfg.learning_rate * g.d_weights;
      model.bias -= cfg.learning_rate * g.d_bias;
    }

    const auto tr = evaluate_with_loss(model, train_set.x, train_set.labels);
    if (!std::isfinite(tr.loss) || !model.weights.allFinite()) {
      throw TrainingDiverged("train: non-finite loss at epoch " + std::to_string(epoch) +
                             " (learning_rate=" + std::to_string(cfg.learning_rate) +
                             "); lower the learning rate");
    }
    const double test_acc =
        test_set.labels.empty() ? 0.0 : evaluate_with_loss(model, test_set.x, test_set.labels).accuracy;
    result.history.push_back({epoch, tr.accuracy, test_acc, tr.loss});
  }
  result.model = std::move(model);
  return result;
}

double accuracy_gap(const EpochMetrics& m) { return m.train_acc - m.test_acc; }

WindowStats window_stats(const std::vector<EpochMetrics>& history, int first, int last,
                         const std::function<double(const EpochMetrics&)>& metric) {
  std::vector<double> values;
  for (const auto& m : history) {
    if (m.epoch >= first && m.epoch <= last) values.push_back(metric(m));
  }
  if (values.empty()) {
    for (const auto& m : history) values.push_back(metric(m));
  }
  WindowStats s;
  s.count = values.size();
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / n);
  return s;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<EpochMetrics>& history,
                       const std::string& comment) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.precision(17);
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "epoch,train_acc,test_acc,train_loss\n";
  for (const auto& m : history) {
    out << m.epoch << ',' << m.train_acc << ',' << m.test_acc << ',' << m.train_loss << '\n';
  }
}

void save_checkpoint(const std::filesystem::path& path, const OnnModel& model,
                     const std::string& sidecar_text) {
  auto out = detail::open_out(path);
  detail::write_magic(out, kCheckpointMagic);
  detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(model.weights.rows()));
  detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(model.weights.cols()));
  const RMatrix w = model.weights;  // row-major on disk
  detail::write_array(out, std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
  detail::write_array(out, std::span<const double>(model.bias.data(), static_cast<std::size_t>(model.bias.size())));
  if (!out) throw std::runtime_error("write failed: " + path.string());

  auto side = path;
  side += ".txt";
  std::ofstream txt(side);
  if (!txt) throw std::runtime_error("cannot open for writing: " + side.string());
  txt << sidecar_text;
}

OnnModel load_checkpoint(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  detail::expect_magic(in, kCheckpointMagic, path);
  const auto rows = static_cast<Eigen::Index>(detail::read_pod<std::uint64_t>(in, path));
  const auto cols = static_cast<Eigen::Index>(detail::read_pod<std::uint64_t>(in, path));
  if (cols != kNumClasses) throw IngestError(path.string() + ": checkpoint must have 10 output classes");
  RMatrix w(rows, cols);
  detail::read_array(in, std::span<double>(w.data(), static_cast<std::size_t>(w.size())), path);
  OnnModel m;
  m.weights = w;
  m.bias.resize(cols);
  detail::read_array(in, std::span<double>(m.bias.data(), static_cast<std::size_t>(cols)), path);
  return m;
}

}  // namespace qrc
