// Copyright 2026 The gaussot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// On-disk formats shared with external feature extractors.
//
// Tensor file ("GOTF", little-endian):
//   magic[4] | version u32 = 1 | dtype u8 (1 = f32) | ndim u8 |
//   dims u32[ndim] | payload f32[prod(dims)], row-major
//
// Stats file ("GOTS", little-endian):
//   magic[4] | version u32 = 1 | m u32 | n_samples u64 |
//   mean f64[m] | cov f64[m*m], row-major
//
// Tensor to sample-matrix convention: a (C, H, W) tensor (or (1, C, H, W))
// becomes n = H*W rows of m = C features; (n, m) maps directly; (n) is a
// single column.

#ifndef GAUSSOT_TENSOR_IO_H_
#define GAUSSOT_TENSOR_IO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gaussot/gaussian_ot.h"

namespace gaussot {

inline constexpr std::uint32_t kTensorFormatVersion = 1;
inline constexpr std::uint32_t kStatsFormatVersion = 1;
inline constexpr std::uint8_t kDtypeFloat32 = 1;

struct FeatureShape {
  int channels = 0;
  int height = 0;
  int width = 0;

  Eigen::Index samples() const {
    return static_cast<Eigen::Index>(height) * width;
  }
  friend bool operator==(const FeatureShape&, const FeatureShape&) = default;
};

struct Tensor {
  SampleMatrix samples;
  std::vector<std::uint32_t> dims;
};

Tensor read_tensor(const std::filesystem::path& path);

// `dims` must describe `samples` under the convention above.
void write_tensor(const std::filesystem::path& path,
                  const SampleMatrix& samples,
                  const std::vector<std::uint32_t>& dims);

std::vector<std::uint32_t> dims_of(const FeatureShape& shape);

// Interprets a 3-D or batch-1 4-D tensor as (C, H, W).
FeatureShape feature_shape(const std::vector<std::uint32_t>& dims);

GaussianStats read_stats(const std::filesystem::path& path);
void write_stats(const std::filesystem::path& path, const GaussianStats& stats);

struct ManifestLevel {
  int level = 0;
  std::filesystem::path input;   // encoded features of the current content
  std::filesystem::path output;  // transformed features, for decoding
  FeatureShape shape;
  std::vector<std::filesystem::path> styles;  // optional per-style features
};

// JSON document:
//   {"version": 1, "levels": [{"level": 1, "input": "...", "output": "...",
//     "shape": [C, H, W], "styles": ["...", ...]}, ...]}
// Level 1 is the finest, level R the coarsest. Relative paths resolve
// against the manifest's directory.
struct Manifest {
  std::vector<ManifestLevel> levels;  // sorted by level, contiguous from 1

  int depth() const { return static_cast<int>(levels.size()); }
  const ManifestLevel& at(int level) const;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace gaussot

#endif  // GAUSSOT_TENSOR_IO_H_
