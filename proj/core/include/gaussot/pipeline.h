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

// End-to-end stylization: single transfer with McCann interpolation, style
// mixing through barycenters, and the multi-resolution level loop over a
// feature codec.

#ifndef GAUSSOT_PIPELINE_H_
#define GAUSSOT_PIPELINE_H_

#include <optional>
#include <span>
#include <vector>

#include "gaussot/codecs.h"
#include "gaussot/frechet_means.h"
#include "gaussot/gaussian_ot.h"

namespace gaussot {

inline constexpr double kPipelineShrink = 1e-5;

struct TransferOptions {
  // Ridge shrink * (trace / m) * I added to estimated covariances.
  double shrink = kPipelineShrink;
  // Apply the ridge only to rank-deficient estimates (n <= m, or a spectrum
  // below rel_trunc * lambda_max). Full-rank pixel clouds stay unbiased.
  bool shrink_deficient_only = true;
  double rel_trunc = kDefaultRelTrunc;
};

GaussianStats feature_stats(const SampleMatrix& x,
                            const TransferOptions& options);

// Transports content samples toward `style` with the map of the requested
// kind, stopping at parameter t along (1 - t) Id + t T.
SampleMatrix stylize(const SampleMatrix& content, const GaussianStats& style,
                     MapKind kind, double t, const TransferOptions& options);

enum class Direction { kCoarseToFine, kFineToCoarse };

struct MixRequest {
  // Metric, weights and iteration budget. With include_content the content
  // weight is the last entry.
  FrechetSpec frechet;
  bool include_content = false;
  MapKind map_kind = MapKind::kOt;
  double t = 1.0;
  Direction direction = Direction::kCoarseToFine;
  TransferOptions options;

  void validate(std::size_t style_count) const;
};

struct MixResult {
  SampleMatrix samples;
  GaussianStats source;  // content statistics the map started from
  GaussianStats target;  // mixed style
  MeanReport report;
};

MixResult mix_styles(const SampleMatrix& content,
                     std::span<const GaussianStats> styles,
                     const MixRequest& request);

struct LevelReport {
  int level = 0;
  double clamp_fraction = 0.0;
  double barycenter_residual = 0.0;
  int barycenter_iterations = 0;
};

template <typename Image>
struct MultiresResult {
  Image image;
  SampleMatrix final_features;  // pre-decode features of the last level
  std::vector<LevelReport> levels;
};

// Levels in processing order: R..1 coarse-to-fine, 1..R fine-to-coarse.
std::vector<int> level_order(int levels, Direction direction);

// Per level r: encode every style at r, mix them, transport the current
// content features to the mix, decode, and re-encode the decoded result at
// the next level. Styles are always encoded from the originals; content
// features come from the previous level's decode.
template <FeatureCodec Codec>
MultiresResult<typename Codec::Image> multires_transfer(
    const typename Codec::Image& content,
    std::span<const typename Codec::Image> styles, Codec& codec,
    const MixRequest& request) {
  request.validate(styles.size());
  std::optional<typename Codec::Image> current(content);
  std::optional<SampleMatrix> features;
  std::vector<LevelReport> reports;
  for (int level : level_order(codec.levels(), request.direction)) {
    Encoded encoded = codec.encode(level, *current);
    std::vector<GaussianStats> style_stats;
    style_stats.reserve(styles.size());
    for (const auto& style : styles) {
      style_stats.push_back(
          feature_stats(codec.encode(level, style).samples, request.options));
    }
    MixResult mixed = mix_styles(encoded.samples, style_stats, request);
    auto decoded = codec.decode(level, mixed.samples, encoded.shape);
    reports.push_back({level, decoded.clamp_fraction,
                       mixed.report.final_residual,
                       mixed.report.iterations_used});
    current = std::move(decoded.image);
    features = std::move(mixed.samples);
  }
  return {std::move(*current), std::move(*features), std::move(reports)};
}

struct GridCell {
  int row = 0;
  int col = 0;
  std::vector<double> weights;
};

// Interpolation weights for contact-sheet layouts:
//   2 corners: one row, linear weights;
//   3 corners: triangle, row i holds i + 1 cells, barycentric coordinates
//              with corners at the apex, bottom-left and bottom-right;
//   4 corners: resolution x resolution square, bilinear weights, corner
//              order top-left, top-right, bottom-left, bottom-right.
std::vector<GridCell> weight_grid(int corners, int resolution);

}  // namespace gaussot

#endif  // GAUSSOT_PIPELINE_H_
