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

#include "qrc/dataset.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include "qrc/error.hpp"

namespace qrc {

namespace {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path, std::size_t offset) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw IngestError(path.string() + ": truncated header at byte offset " + std::to_string(offset));
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::ifstream open_idx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open IDX file: " + path.string());
  return in;
}

void expect_magic(std::uint32_t got, std::uint32_t want, const std::filesystem::path& path) {
  if (got != want) {
    throw IngestError(path.string() + ": bad magic number " + std::to_string(got) +
                      " at byte offset 0 (expected " + std::to_string(want) + ")");
  }
}

void read_payload(std::istream& in, std::uint8_t* dst, std::size_t bytes,
                  const std::filesystem::path& path, std::size_t offset) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(bytes));
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got != bytes) {
    throw IngestError(path.string() + ": truncated payload, expected " + std::to_string(bytes) +
                      " bytes from offset " + std::to_string(offset) + " but file ends at offset " +
                      std::to_string(offset + got));
  }
}

}  // namespace

void ImageDataset::push_back(std::span<const std::uint8_t> image, std::uint8_t label) {
  if (image.size() != kMnistPixels) throw ContractViolation("ImageDataset: image must have 784 pixels");
  pixels.insert(pixels.end(), image.begin(), image.end());
  labels.push_back(label);
}

ImageDataset load_mnist_idx(const std::filesystem::path& images_path,
                            const std::filesystem::path& labels_path) {
  ImageDataset data;

  auto img = open_idx(images_path);
  expect_magic(read_be32(img, images_path, 0), kImageMagic, images_path);
  const std::uint32_t n_images = read_be32(img, images_path, 4);
  const std::uint32_t rows = read_be32(img, images_path, 8);
  const std::uint32_t cols = read_be32(img, images_path, 12);
  if (rows != kMnistRows || cols != kMnistCols) {
    throw IngestError(images_path.string() + ": expected 28x28 images at byte offset 8, got " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  }

  auto lab = open_idx(labels_path);
  expect_magic(read_be32(lab, labels_path, 0), kLabelMagic, labels_path);
  const std::uint32_t n_labels = read_be32(lab, labels_path, 4);
  if (n_images != n_labels) {
    throw IngestError("count mismatch: " + images_path.string() + " declares " +
                      std::to_string(n_images) + " images at byte offset 4 but " +
                      labels_path.string() + " declares " + std::to_string(n_labels) + " labels");
  }

  data.pixels.resize(std::size_t{n_images} * kMnistPixels);
  read_payload(img, data.pixels.data(), data.pixels.size(), images_path, 16);
  data.labels.resize(n_labels);
  read_payload(lab, data.labels.data(), data.labels.size(), labels_path, 8);

  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (data.labels[i] >= kNumClasses) {
      throw IngestError(labels_path.string() + ": label " + std::to_string(data.labels[i]) +
                        " out of range at byte offset " + std::to_string(8 + i));
    }
  }
  return data;
}

void save_mnist_idx(const ImageDataset& data, const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path) {
  for (const auto& p : {images_path, labels_path}) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream img(images_path, std::ios::binary | std::ios::trunc);
  std::ofstream lab(labels_path, std::ios::binary | std::ios::trunc);
  if (!img || !lab) throw std::runtime_error("cannot write IDX files under " + images_path.string());
  const auto n = static_cast<std::uint32_t>(data.size());
  write_be32(img, kImageMagic);
  write_be32(img, n);
  write_be32(img, kMnistRows);
  write_be32(img, kMnistCols);
  img.write(reinterpret_cast<const char*>(data.pixels.data()),
            static_cast<std::streamsize>(data.pixels.size()));
  write_be32(lab, kLabelMagic);
  write_be32(lab, n);
  lab.write(reinterpret_cast<const char*>(data.labels.data()),
            static_cast<std::streamsize>(data.labels.size()));
}

ImageDataset stratified_subsample(const ImageDataset& data, std::size_t count, std::uint64_t seed) {
  const std::size_t total = data.size();
  if (count == 0 || count >= total) return data;

  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < total; ++i) by_class[data.labels[i]].push_back(i);

  // Largest-remainder apportionment; ties go to the lower class index.
  std::array<std::size_t, kNumClasses> quota{};
  std::array<std::pair<double, int>, kNumClasses> remainders{};
  std::size_t assigned = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    const double exact = static_cast<double>(count) * static_cast<double>(by_class[c].size()) /
                         static_cast<double>(total);
    quota[c] = static_cast<std::size_t>(exact);
    assigned += quota[c];
    remainders[c] = {exact - static_cast<double>(quota[c]), c};
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < count; ++r) {
    const int c = remainders[r % kNumClasses].second;
    if (quota[c] < by_class[c].size()) {
      ++quota[c];
      ++assigned;
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  for (int c = 0; c < kNumClasses; ++c) {
    auto idx = by_class[c];
    std::shuffle(idx.begin(), idx.end(), rng);
    chosen.insert(chosen.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]));
  }
  std::sort(chosen.begin(), chosen.end());

  ImageDataset out;
  out.pixels.reserve(count * kMnistPixels);
  out.labels.reserve(count);
  for (std::size_t i : chosen) out.push_back(data.image(i), data.labels[i]);
  return out;
}

}  // namespace qrc
