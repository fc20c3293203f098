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

// Gaussian summaries of feature clouds and the closed-form transport maps
// between them: the optimal (Monge) map, whitening-coloring, per-channel
// normalization, and McCann interpolation along the Wasserstein geodesic.

#ifndef GAUSSOT_GAUSSIAN_OT_H_
#define GAUSSOT_GAUSSIAN_OT_H_

#include <cstdint>

#include <Eigen/Dense>

#include "gaussot/psd_linalg.h"

namespace gaussot {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// n x m feature samples, one row per spatial location (or pixel).
class SampleMatrix {
 public:
  // Throws InvalidArgumentError if empty or non-finite.
  explicit SampleMatrix(RowMatrix data);

  Eigen::Index n() const { return data_.rows(); }
  Eigen::Index m() const { return data_.cols(); }
  const RowMatrix& data() const { return data_; }

 private:
  RowMatrix data_;
};

class GaussianStats {
 public:
  GaussianStats(Eigen::VectorXd mean, SpdMatrix cov, std::int64_t n_samples = 0);

  Eigen::Index dim() const { return mean_.size(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const SpdMatrix& cov() const { return cov_; }
  // Zero for synthetic statistics (barycenters, interpolates).
  std::int64_t n_samples() const { return n_samples_; }

 private:
  Eigen::VectorXd mean_;
  SpdMatrix cov_;
  std::int64_t n_samples_;
};

enum class MapKind { kOt, kWct, kAdaIn, kIdentity };

const char* to_string(MapKind kind);

// x -> dst_mean + linear * (x - src_mean)
struct TransportMap {
  MapKind kind = MapKind::kIdentity;
  Eigen::VectorXd src_mean;
  Eigen::MatrixXd linear;
  Eigen::VectorXd dst_mean;

  Eigen::Index dim() const { return linear.rows(); }
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
};

TransportMap identity_map(Eigen::Index dim);

// Column means and the 1/n covariance, plus shrink * (trace / m) * I.
GaussianStats estimate_stats(const SampleMatrix& x, double shrink = 0.0);

// ||mu1 - mu2||^2 + bures_distance_sq(cov1, cov2).
double w2_gaussian_sq(const GaussianStats& a, const GaussianStats& b);

// Optimal map: A = S^-1/2 (S^1/2 D S^1/2)^1/2 S^-1/2 with S = src.cov,
// D = dst.cov, inverse roots truncated at rel_trunc. A is symmetric PSD.
TransportMap monge_map(const GaussianStats& src, const GaussianStats& dst,
                       double rel_trunc = kDefaultRelTrunc);

// Whitening-coloring: A = D^1/2 S^-1/2. Coincides with monge_map only when
// the covariances commute.
TransportMap wct_map(const GaussianStats& src, const GaussianStats& dst,
                     double rel_trunc = kDefaultRelTrunc);

// Diagonal map from covariance diagonals only. Source channels whose
// variance is at most rel_trunc times the largest source variance get gain
// zero instead of a division blow-up.
TransportMap adain_map(const GaussianStats& src, const GaussianStats& dst,
                       double rel_trunc = kDefaultRelTrunc);

TransportMap make_map(MapKind kind, const GaussianStats& src,
                      const GaussianStats& dst,
                      double rel_trunc = kDefaultRelTrunc);

SampleMatrix apply_map(const TransportMap& map, const SampleMatrix& x);

// Row-wise (1 - t) x + t T(x); t = 0 returns x and t = 1 returns
// apply_map(map, x) exactly.
SampleMatrix mccann_pushforward(const SampleMatrix& x, const TransportMap& map,
                                double t);

// Closed-form point at parameter t on the W2 geodesic from content to
// style: mean (1-t) mu_c + t mu_s, cov B Sigma_c B with B = (1-t) I + t A.
GaussianStats mccann_stats(const GaussianStats& content,
                           const GaussianStats& style, double t,
                           double rel_trunc = kDefaultRelTrunc);

}  // namespace gaussot

#endif  // GAUSSOT_GAUSSIAN_OT_H_
