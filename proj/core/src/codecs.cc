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

#include "gaussot/codecs.h"

#include <string>

#include "gaussot/error.h"

namespace gaussot {
namespace {

void check_level(int level, int levels) {
  if (level < 1 || level > levels) {
    throw DimensionError("codec level mismatch: level " +
                         std::to_string(level) + " of " +
                         std::to_string(levels));
  }
}

}  // namespace

Encoded PixelCodec::encode(int level, const PixelImage& image) const {
  check_level(level, levels());
  if (image.rgb.cols() != 3 ||
      image.rgb.rows() != static_cast<Eigen::Index>(image.width) * image.height) {
    throw DimensionError("pixel buffer does not match image size");
  }
  return {SampleMatrix(image.rgb), FeatureShape{3, image.height, image.width}};
}

Decoded<PixelImage> PixelCodec::decode(int level, const SampleMatrix& samples,
                                       const FeatureShape& shape) const {
  check_level(level, levels());
  if (shape.channels != 3 || samples.m() != 3 ||
      samples.n() != shape.samples()) {
    throw DimensionError("codec level mismatch: samples do not fit the image");
  }
  PixelImage image;
  image.width = shape.width;
  image.height = shape.height;
  image.rgb = samples.data().cwiseMax(0.0).cwiseMin(1.0);
  Eigen::Index clamped = 0;
  for (Eigen::Index p = 0; p < samples.n(); ++p) {
    const auto row = samples.data().row(p);
    if (row.minCoeff() < 0.0 || row.maxCoeff() > 1.0) ++clamped;
  }
  return {std::move(image),
          static_cast<double>(clamped) / static_cast<double>(samples.n())};
}

FileTensorCodec::FileTensorCodec(Manifest manifest, Bridge bridge)
    : manifest_(std::move(manifest)), bridge_(std::move(bridge)) {}

Encoded FileTensorCodec::encode(int level, const Image& image) {
  check_level(level, levels());
  const ManifestLevel& entry = manifest_.at(level);
  if (image.style >= 0) {
    if (static_cast<std::size_t>(image.style) >= entry.styles.size()) {
      throw DimensionError("manifest level " + std::to_string(level) +
                           " has no style " + std::to_string(image.style));
    }
    Tensor t = read_tensor(entry.styles[static_cast<std::size_t>(image.style)]);
    const FeatureShape shape = feature_shape(t.dims);
    if (shape.channels != entry.shape.channels) {
      throw DimensionError("codec level mismatch: style tensor has " +
                           std::to_string(shape.channels) + " channels, level " +
                           std::to_string(level) + " expects " +
                           std::to_string(entry.shape.channels));
    }
    return {std::move(t.samples), shape};
  }
  if (image.decoded_at != 0 && image.decoded_at != level) {
    if (!bridge_) {
      throw DimensionError("no bridge to re-encode the level " +
                           std::to_string(image.decoded_at) +
                           " output at level " + std::to_string(level));
    }
    bridge_(image.decoded_at, level);
  }
  Tensor t = read_tensor(entry.input);
  const FeatureShape shape = feature_shape(t.dims);
  if (!(shape == entry.shape)) {
    throw DimensionError("codec level mismatch: input tensor for level " +
                         std::to_string(level) +
                         " does not match the manifest shape");
  }
  return {std::move(t.samples), shape};
}

Decoded<FileTensorCodec::Image> FileTensorCodec::decode(
    int level, const SampleMatrix& samples, const FeatureShape& shape) {
  check_level(level, levels());
  if (samples.m() != shape.channels || samples.n() != shape.samples()) {
    throw DimensionError("codec level mismatch: samples do not fit the shape");
  }
  write_tensor(manifest_.at(level).output, samples, dims_of(shape));
  return {Image{-1, level}, 0.0};
}

}  // namespace gaussot
