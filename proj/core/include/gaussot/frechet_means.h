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

// Weighted Frechet means of covariance matrices under four metrics, and the
// Gaussian barycenter that defines a mixed style.

#ifndef GAUSSOT_FRECHET_MEANS_H_
#define GAUSSOT_FRECHET_MEANS_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gaussot/gaussian_ot.h"
#include "gaussot/psd_linalg.h"

namespace gaussot {

enum class FrechetMetric { kBures, kFisherRao, kArithmetic, kHarmonic };

const char* to_string(FrechetMetric metric);

struct FrechetSpec {
  FrechetMetric metric = FrechetMetric::kBures;
  // Non-negative, summing to one, at least one positive.
  std::vector<double> weights;
  int max_iter = 50;
  // Gradient step for the Fisher-Rao (Karcher) iteration.
  double step = 0.01;
  double rel_tol = 1e-9;
  double rel_trunc = kDefaultRelTrunc;
  // Karcher only: halve the step whenever the objective would increase.
  bool backtracking = false;
  // Harmonic only: use truncated pseudo-inverses for rank-deficient inputs.
  bool allow_pseudo_inverse = false;

  // Throws InvalidArgumentError / DimensionError.
  void validate(std::size_t count) const;
};

struct MeanReport {
  SpdMatrix result;
  int iterations_used = 0;
  // Bures: relative change of one fixed-point update applied to `result`.
  // FisherRao: Frobenius norm of the weighted log-gradient at `result`.
  // Closed forms: 0.
  double final_residual = 0.0;
};

// Fixed-point iteration
//   S <- S^-1/2 (sum_j w_j (S^1/2 C_j S^1/2)^1/2)^2 S^-1/2
// started from the input with the largest weight (lowest index on ties).
MeanReport bures_barycenter(std::span<const SpdMatrix> sigmas,
                            const FrechetSpec& spec);

// Riemannian gradient iteration
//   S <- S^1/2 exp(-step * sum_j w_j log(S^1/2 C_j^-1 S^1/2)) S^1/2
// with the same initialization. Inputs must be full rank.
MeanReport karcher_mean(std::span<const SpdMatrix> sigmas,
                        const FrechetSpec& spec);

MeanReport arithmetic_mean(std::span<const SpdMatrix> sigmas,
                           const FrechetSpec& spec);

MeanReport harmonic_mean(std::span<const SpdMatrix> sigmas,
                         const FrechetSpec& spec);

// Dispatches on spec.metric.
MeanReport frechet_mean(std::span<const SpdMatrix> sigmas,
                        const FrechetSpec& spec);

struct StatsBarycenter {
  GaussianStats stats;
  MeanReport report;
};

// Weighted arithmetic mean of the means, frechet_mean of the covariances.
// With `content`, weights has one extra entry (the content's, last).
StatsBarycenter barycenter_stats(std::span<const GaussianStats> styles,
                                 const std::optional<GaussianStats>& content,
                                 const FrechetSpec& spec);

}  // namespace gaussot

#endif  // GAUSSOT_FRECHET_MEANS_H_
