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

#include "gaussot/gaussian_ot.h"

#include <cmath>
#include <sstream>
#include <utility>

#include "gaussot/error.h"

namespace gaussot {
namespace {

void check_dims(const GaussianStats& a, const GaussianStats& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << "statistics dimension mismatch: " << a.dim() << " vs " << b.dim();
    throw DimensionError(msg.str());
  }
}

void check_t(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw InvalidArgumentError("interpolation parameter t must lie in [0, 1]");
  }
}

}  // namespace

SampleMatrix::SampleMatrix(RowMatrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw InvalidArgumentError("sample matrix must have n >= 1 and m >= 1");
  }
  if (!data_.allFinite()) {
    throw InvalidArgumentError("sample matrix entries must be finite");
  }
}

GaussianStats::GaussianStats(Eigen::VectorXd mean, SpdMatrix cov,
                             std::int64_t n_samples)
    : mean_(std::move(mean)), cov_(std::move(cov)), n_samples_(n_samples) {
  if (mean_.size() != cov_.dim()) {
    throw DimensionError("mean and covariance dimensions differ");
  }
  if (!mean_.allFinite()) throw InvalidArgumentError("mean must be finite");
  if (n_samples_ < 0) throw InvalidArgumentError("n_samples must be >= 0");
}

const char* to_string(MapKind kind) {
  switch (kind) {
    case MapKind::kOt:
      return "ot";
    case MapKind::kWct:
      return "wct";
    case MapKind::kAdaIn:
      return "adain";
    case MapKind::kIdentity:
      return "identity";
  }
  return "unknown";
}

Eigen::VectorXd TransportMap::operator()(const Eigen::VectorXd& x) const {
  return dst_mean + linear * (x - src_mean);
}

TransportMap identity_map(Eigen::Index dim) {
  TransportMap map;
  map.kind = MapKind::kIdentity;
  map.src_mean = Eigen::VectorXd::Zero(dim);
  map.dst_mean = Eigen::VectorXd::Zero(dim);
  map.linear = Eigen::MatrixXd::Identity(dim, dim);
  return map;
}

GaussianStats estimate_stats(const SampleMatrix& x, double shrink) {
  if (!(shrink >= 0.0)) throw InvalidArgumentError("shrink must be >= 0");
  const double n = static_cast<double>(x.n());
  const Eigen::VectorXd mean = x.data().colwise().mean().transpose();
  const RowMatrix centered = x.data().rowwise() - mean.transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / n;
  if (shrink > 0.0) {
    const double ridge = shrink * cov.trace() / static_cast<double>(x.m());
    cov.diagonal().array() += ridge;
  }
  return GaussianStats(mean, SpdMatrix(cov), x.n());
}

double w2_gaussian_sq(const GaussianStats& a, const GaussianStats& b) {
  check_dims(a, b);
  return (a.mean() - b.mean()).squaredNorm() +
         bures_distance_sq(a.cov(), b.cov());
}

TransportMap monge_map(const GaussianStats& src, const GaussianStats& dst,
                       double rel_trunc) {
  check_dims(src, dst);
  const SpdMatrix root = sqrtm(src.cov());
  const SpdMatrix inv_root = inv_sqrtm(src.cov(), rel_trunc);
  const SpdMatrix middle = sqrtm(congruence(root.matrix(), dst.cov()));
  TransportMap map;
  map.kind = MapKind::kOt;
  map.src_mean = src.mean();
  map.dst_mean = dst.mean();
  map.linear =
      symmetrize(inv_root.matrix() * middle.matrix() * inv_root.matrix());
  return map;
}

TransportMap wct_map(const GaussianStats& src, const GaussianStats& dst,
                     double rel_trunc) {
  check_dims(src, dst);
  TransportMap map;
  map.kind = MapKind::kWct;
  map.src_mean = src.mean();
  map.dst_mean = dst.mean();
  map.linear =
      sqrtm(dst.cov()).matrix() * inv_sqrtm(src.cov(), rel_trunc).matrix();
  return map;
}

TransportMap adain_map(const GaussianStats& src, const GaussianStats& dst,
                       double rel_trunc) {
  check_dims(src, dst);
  const Eigen::VectorXd src_var = src.cov().matrix().diagonal();
  const Eigen::VectorXd dst_var = dst.cov().matrix().diagonal();
  const double cut = rel_trunc * src_var.maxCoeff();
  Eigen::VectorXd gain(src_var.size());
  for (Eigen::Index i = 0; i < gain.size(); ++i) {
    gain(i) = (src_var(i) <= 0.0 || src_var(i) <= cut)
                  ? 0.0
                  : std::sqrt(dst_var(i)) / std::sqrt(src_var(i));
  }
  TransportMap map;
  map.kind = MapKind::kAdaIn;
  map.src_mean = src.mean();
  map.dst_mean = dst.mean();
  map.linear = gain.asDiagonal();
  return map;
}

TransportMap make_map(MapKind kind, const GaussianStats& src,
                      const GaussianStats& dst, double rel_trunc) {
  switch (kind) {
    case MapKind::kOt:
      return monge_map(src, dst, rel_trunc);
    case MapKind::kWct:
      return wct_map(src, dst, rel_trunc);
    case MapKind::kAdaIn:
      return adain_map(src, dst, rel_trunc);
    case MapKind::kIdentity:
      check_dims(src, dst);
      return identity_map(src.dim());
  }
  throw InvalidArgumentError("unknown map kind");
}

SampleMatrix apply_map(const TransportMap& map, const SampleMatrix& x) {
  if (x.m() != map.dim()) {
    std::ostringstream msg;
    msg << "map dimension " << map.dim() << " does not match samples with m="
        << x.m();
    throw DimensionError(msg.str());
  }
  const RowMatrix centered = x.data().rowwise() - map.src_mean.transpose();
  RowMatrix out = centered * map.linear.transpose();
  out.rowwise() += map.dst_mean.transpose();
  return SampleMatrix(std::move(out));
}

SampleMatrix mccann_pushforward(const SampleMatrix& x, const TransportMap& map,
                                double t) {
  check_t(t);
  if (t == 0.0) {
    if (x.m() != map.dim()) throw DimensionError("map/sample dimension mismatch");
    return x;
  }
  SampleMatrix pushed = apply_map(map, x);
  if (t == 1.0) return pushed;
  RowMatrix out = (1.0 - t) * x.data() + t * pushed.data();
  return SampleMatrix(std::move(out));
}

GaussianStats mccann_stats(const GaussianStats& content,
                           const GaussianStats& style, double t,
                           double rel_trunc) {
  check_t(t);
  check_dims(content, style);
  const TransportMap map = monge_map(content, style, rel_trunc);
  const Eigen::Index m = content.dim();
  const Eigen::MatrixXd step =
      (1.0 - t) * Eigen::MatrixXd::Identity(m, m) + t * map.linear;
  Eigen::VectorXd mean = (1.0 - t) * content.mean() + t * style.mean();
  return GaussianStats(std::move(mean), congruence(step, content.cov()), 0);
}

}  // namespace gaussot
