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
#include <vector>

namespace qrc {

inline constexpr std::size_t kMnistRows = 28;
inline constexpr std::size_t kMnistCols = 28;
inline constexpr std::size_t kMnistPixels = kMnistRows * kMnistCols;
inline constexpr int kNumClasses = 10;

// Row-major 28x28 byte images with labels 0-9.
struct ImageDataset {
  std::vector<std::uint8_t> pixels;  // size() * kMnistPixels
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const std::uint8_t, kMnistPixels> image(std::size_t i) const {
    return std::span<const std::uint8_t, kMnistPixels>(pixels.data() + i * kMnistPixels,
                                                       kMnistPixels);
  }
  void push_back(std::span<const std::uint8_t> image, std::uint8_t label);
};

// Parses an IDX image file (magic 2051, 28x28) and an IDX label file (magic 2049).
// Throws IngestError naming the byte offset on bad magic, truncation, label
// values > 9, or a count mismatch between the two files.
ImageDataset load_mnist_idx(const std::filesystem::path& images_path,
                            const std::filesystem::path& labels_path);

// Writes the dataset back out in the same IDX layout.
void save_mnist_idx(const ImageDataset& data, const std::filesystem::path& images_path,
                    const std::filesystem::path& labels_path);

// Seeded, label-stratified subsample of `count` images (largest-remainder quotas
// per class). Selected images keep their original relative order. count == 0 or
// count >= size returns the full dataset.
ImageDataset stratified_subsample(const ImageDataset& data, std::size_t count, std::uint64_t seed);

}  // namespace qrc
