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

#include "gaussot/pipeline.h"

#include <string>

#include "gaussot/error.h"

namespace gaussot {
namespace {

bool rank_deficient(const GaussianStats& stats, Eigen::Index n,
                    double rel_trunc) {
  if (n <= stats.dim()) return true;
  const SpdMatrix& cov = stats.cov();
  return !(cov.min_eigenvalue() > 0.0) ||
         cov.min_eigenvalue() < rel_trunc * cov.max_eigenvalue();
}

SampleMatrix transport(const SampleMatrix& content, const GaussianStats& source,
                       const GaussianStats& target, MapKind kind, double t,
                       double rel_trunc) {
  const TransportMap map = make_map(kind, source, target, rel_trunc);
  return mccann_pushforward(content, map, t);
}

}  // namespace

GaussianStats feature_stats(const SampleMatrix& x,
                            const TransferOptions& options) {
  if (options.shrink == 0.0) return estimate_stats(x, 0.0);
  if (!options.shrink_deficient_only) return estimate_stats(x, options.shrink);
  GaussianStats plain = estimate_stats(x, 0.0);
  if (!rank_deficient(plain, x.n(), options.rel_trunc)) return plain;
  return estimate_stats(x, options.shrink);
}

SampleMatrix stylize(const SampleMatrix& content, const GaussianStats& style,
                     MapKind kind, double t, const TransferOptions& options) {
  return transport(content, feature_stats(content, options), style, kind, t,
                   options.rel_trunc);
}

void MixRequest::validate(std::size_t style_count) const {
  if (style_count == 0) throw InvalidArgumentError("at least one style required");
  frechet.validate(style_count + (include_content ? 1 : 0));
  if (!(t >= 0.0 && t <= 1.0)) {
    throw InvalidArgumentError("t must lie in [0, 1]");
  }
}

MixResult mix_styles(const SampleMatrix& content,
                     std::span<const GaussianStats> styles,
                     const MixRequest& request) {
  request.validate(styles.size());
  GaussianStats source = feature_stats(content, request.options);
  std::optional<GaussianStats> content_entry;
  if (request.include_content) content_entry = source;
  StatsBarycenter mixed =
      barycenter_stats(styles, content_entry, request.frechet);
  SampleMatrix out = transport(content, source, mixed.stats, request.map_kind,
                               request.t, request.options.rel_trunc);
  return {std::move(out), std::move(source), std::move(mixed.stats),
          std::move(mixed.report)};
}

std::vector<int> level_order(int levels, Direction direction) {
  if (levels < 1) throw InvalidArgumentError("codec must expose >= 1 level");
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(levels));
  if (direction == Direction::kCoarseToFine) {
    for (int r = levels; r >= 1; --r) order.push_back(r);
  } else {
    for (int r = 1; r <= levels; ++r) order.push_back(r);
  }
  return order;
}

std::vector<GridCell> weight_grid(int corners, int resolution) {
  if (resolution < 2) throw InvalidArgumentError("resolution must be >= 2");
  const double span = static_cast<double>(resolution - 1);
  std::vector<GridCell> cells;
  switch (corners) {
    case 2:
      for (int k = 0; k < resolution; ++k) {
        const double s = k / span;
        cells.push_back({0, k, {1.0 - s, s}});
      }
      break;
    case 3:
      for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j <= i; ++j) {
          cells.push_back({i, j,
                           {(resolution - 1 - i) / span, (i - j) / span,
                            j / span}});
        }
      }
      break;
    case 4:
      for (int row = 0; row < resolution; ++row) {
        const double v = row / span;
        for (int col = 0; col < resolution; ++col) {
          const double u = col / span;
          cells.push_back({row, col,
                           {(1.0 - u) * (1.0 - v), u * (1.0 - v),
                            (1.0 - u) * v, u * v}});
        }
      }
      break;
    default:
      throw InvalidArgumentError("unsupported corner count " +
                                 std::to_string(corners) + " (use 2, 3 or 4)");
  }
  return cells;
}

}  // namespace gaussot
