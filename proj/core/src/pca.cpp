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

#include "qrc/pca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "binary_io.hpp"
#include "qrc/error.hpp"
#include "qrc/hash.hpp"

namespace qrc {

namespace {

constexpr char kPcaMagic[9] = "QRCPCA01";

Eigen::Index numerical_rank(const RVector& singular, Eigen::Index rows, Eigen::Index cols) {
  if (singular.size() == 0 || singular[0] <= 0.0) return 0;
  const double tol = singular[0] * static_cast<double>(std::max(rows, cols)) *
                     std::numeric_limits<double>::epsilon();
  Eigen::Index r = 0;
  while (r < singular.size() && singular[r] > tol) ++r;
  return r;
}

}  // namespace

Eigen::MatrixXd to_matrix(const ImageDataset& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd m(n, static_cast<Eigen::Index>(kMnistPixels));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto img = data.image(static_cast<std::size_t>(i));
    for (Eigen::Index p = 0; p < m.cols(); ++p) m(i, p) = img[static_cast<std::size_t>(p)];
  }
  return m;
}

namespace {

// num_components < 0 keeps every right singular vector, null directions included.
PcaModel fit_pca_impl(const Eigen::MatrixXd& data, Eigen::Index num_components) {
  if (data.rows() == 0) throw ConfigError("fit_pca: training set is empty");
  if (num_components == 0 || num_components > data.cols()) {
    throw ConfigError("fit_pca: num_components must be in [1, " + std::to_string(data.cols()) + "]");
  }

  PcaModel pca;
  pca.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - pca.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const Eigen::Index rank = numerical_rank(s, centered.rows(), centered.cols());
  const bool keep_all = num_components < 0;
  if (keep_all) {
    if (rank == 0) throw ConfigError("fit_pca: centered data has rank 0");
    num_components = svd.matrixV().cols();
  } else if (num_components > rank) {
    throw ConfigError("fit_pca: requested " + std::to_string(num_components) +
                      " components but the centered data has rank " + std::to_string(rank));
  }

  pca.basis = svd.matrixV().leftCols(num_components);
  for (Eigen::Index c = 0; c < num_components; ++c) {
    Eigen::Index arg = 0;
    pca.basis.col(c).cwiseAbs().maxCoeff(&arg);  // first maximal index
    if (pca.basis(arg, c) < 0.0) pca.basis.col(c) *= -1.0;
  }

  const double dof = data.rows() > 1 ? static_cast<double>(data.rows() - 1) : 1.0;
  pca.explained_variance = s.head(num_components).array().square() / dof;
  pca.total_variance = s.squaredNorm() / dof;

  const Eigen::MatrixXd proj = centered * pca.basis;
  pca.train_min = proj.colwise().minCoeff().transpose();
  pca.train_max = proj.colwise().maxCoeff().transpose();
  for (Eigen::Index c = 0; c < num_components && !keep_all; ++c) {
    if (!(pca.train_min[c] < pca.train_max[c])) {
      throw ConfigError("fit_pca: component " + std::to_string(c) + " has no spread on the training set");
    }
  }
  return pca;
}

}  // namespace

PcaModel fit_pca(const Eigen::MatrixXd& data, Eigen::Index num_components) {
  if (num_components < 1) throw ConfigError("fit_pca: num_components must be >= 1");
  return fit_pca_impl(data, num_components);
}

PcaModel fit_pca_rotation(const Eigen::MatrixXd& data) { return fit_pca_impl(data, -1); }

PcaModel fit_pca(const ImageDataset& train, Eigen::Index num_components) {
  return fit_pca(to_matrix(train), num_components);
}

RVector project(const PcaModel& pca, const RVector& x) {
  if (x.size() != pca.input_dim()) throw ContractViolation("project: input dimension mismatch");
  return pca.basis.transpose() * (x - pca.mean);
}

RVector project(const PcaModel& pca, std::span<const std::uint8_t> image) {
  RVector x(static_cast<Eigen::Index>(image.size()));
  for (std::size_t p = 0; p < image.size(); ++p) x[static_cast<Eigen::Index>(p)] = image[p];
  return project(pca, x);
}

Eigen::MatrixXd project_all(const PcaModel& pca, const ImageDataset& data) {
  const Eigen::MatrixXd centered = to_matrix(data).rowwise() - pca.mean.transpose();
  return centered * pca.basis;
}

std::uint64_t pca_hash(const PcaModel& pca) {
  Fnv1a h;
  const auto add = [&h](const auto& m) {
    h.value(static_cast<std::int64_t>(m.rows())).value(static_cast<std::int64_t>(m.cols()));
    h.bytes(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
  };
  add(pca.mean);
  add(pca.basis);
  add(pca.train_min);
  add(pca.train_max);
  return h.digest();
}

void save_pca(const std::filesystem::path& path, const PcaModel& pca) {
  auto out = detail::open_out(path);
  detail::write_magic(out, kPcaMagic);
  detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(pca.input_dim()));
  detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(pca.components()));
  const auto put = [&out](const auto& m) {
    detail::write_array(out, std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
  };
  put(pca.mean);
  put(pca.basis);
  put(pca.train_min);
  put(pca.train_max);
  put(pca.explained_variance);
  detail::write_pod(out, pca.total_variance);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

PcaModel load_pca(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  detail::expect_magic(in, kPcaMagic, path);
  const auto dim = static_cast<Eigen::Index>(detail::read_pod<std::uint64_t>(in, path));
  const auto k = static_cast<Eigen::Index>(detail::read_pod<std::uint64_t>(in, path));
  PcaModel pca;
  pca.mean.resize(dim);
  pca.basis.resize(dim, k);
  pca.train_min.resize(k);
  pca.train_max.resize(k);
  pca.explained_variance.resize(k);
  const auto get = [&](auto& m) {
    detail::read_array(in, std::span<double>(m.data(), static_cast<std::size_t>(m.size())), path);
  };
  get(pca.mean);
  get(pca.basis);
  get(pca.train_min);
  get(pca.train_max);
  get(pca.explained_variance);
  pca.total_variance = detail::read_pod<double>(in, path);
  return pca;
}

}  // namespace qrc
