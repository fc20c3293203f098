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

#include "gaussot/frechet_means.h"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gaussot/error.h"

namespace gaussot {
namespace {

constexpr double kWeightSumTolerance = 1e-12;
// Cholesky pivots must clear the truncation threshold by this factor.
constexpr double kCholeskyGuard = 100.0;
constexpr double kObjectiveNoise = 1e-12;

void check_inputs(std::span<const SpdMatrix> sigmas, const FrechetSpec& spec) {
  if (sigmas.empty()) throw InvalidArgumentError("no covariances to average");
  spec.validate(sigmas.size());
  for (const SpdMatrix& s : sigmas) {
    if (s.dim() != sigmas.front().dim()) {
      throw DimensionError("covariances to average have different dimensions");
    }
  }
}

// Lowest index among the largest weights.
std::size_t argmax_weight(const std::vector<double>& w) {
  return static_cast<std::size_t>(
      std::distance(w.begin(), std::max_element(w.begin(), w.end())));
}

// Index of the single positive weight, if there is exactly one. A one-hot
// mean is that input, returned untouched so that corner cells of a grid
// reproduce single-style results bit for bit.
std::optional<std::size_t> one_hot_index(const std::vector<double>& w) {
  std::optional<std::size_t> hit;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] > 0.0) {
      if (hit) return std::nullopt;
      hit = j;
    }
  }
  return hit;
}

// x * x^T, computed as a symmetric rank update.
Eigen::MatrixXd gram(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(x.rows(), x.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(x);
  return g.selfadjointView<Eigen::Lower>();
}

// Symmetric square root of a PSD matrix given without a cached spectrum.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& k) {
  const EigenDecomp e = sym_eigen(k);
  const Eigen::VectorXd quarter =
      e.values.unaryExpr([](double v) { return std::sqrt(std::sqrt(std::max(v, 0.0))); });
  return gram(e.vectors * quarter.asDiagonal());
}

// One fixed-point update S^-1/2 (sum_j w_j (S^1/2 C_j S^1/2)^1/2)^2 S^-1/2.
// Any factor S = R R^T gives the same result, since (R^T C R)^1/2 is
// (S^1/2 C S^1/2)^1/2 rotated by the orthogonal matrix S^-1/2 R. A Cholesky
// factor is used when S is comfortably full rank; otherwise R = V D^1/2 from
// the spectrum, with the truncated inverse root applied on the way out.
Eigen::MatrixXd bures_update(const Eigen::MatrixXd& current,
                             std::span<const SpdMatrix> sigmas,
                             const FrechetSpec& spec) {
  const Eigen::Index m = current.rows();
  auto weighted_roots = [&](const auto& congruent) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t j = 0; j < sigmas.size(); ++j) {
      if (spec.weights[j] == 0.0) continue;
      sum += spec.weights[j] * psd_sqrt(congruent(sigmas[j].matrix()));
    }
    return sum;
  };

  const Eigen::LLT<Eigen::MatrixXd> llt(current);
  if (llt.info() == Eigen::Success) {
    const Eigen::MatrixXd l = llt.matrixL();
    const double pivot = l.diagonal().cwiseAbs2().minCoeff();
    if (pivot > kCholeskyGuard * std::max(spec.rel_trunc, 1e-14) *
                    current.diagonal().maxCoeff()) {
      const auto lower = l.triangularView<Eigen::Lower>();
      const Eigen::MatrixXd sum = weighted_roots([&](const Eigen::MatrixXd& c) {
        const Eigen::MatrixXd cl = c * lower;
        return Eigen::MatrixXd(lower.transpose() * cl);
      });
      return gram(lower.transpose().solve(sum));
    }
  }

  const EigenDecomp e = sym_eigen(current);
  const Eigen::VectorXd values = e.values.cwiseMax(0.0);
  const Eigen::MatrixXd r = e.vectors * values.cwiseSqrt().asDiagonal();
  const Eigen::MatrixXd sum = weighted_roots([&](const Eigen::MatrixXd& c) {
    return Eigen::MatrixXd(r.transpose() * c * r);
  });
  const double cutoff = spec.rel_trunc * values(0);
  const Eigen::VectorXd inv_root = values.unaryExpr([cutoff](double v) {
    return v <= 0.0 || v < cutoff ? 0.0 : 1.0 / std::sqrt(v);
  });
  return gram(e.vectors * (inv_root.asDiagonal() * sum));
}

struct KarcherState {
  Eigen::MatrixXd gradient;
  double objective = 0.0;
};

KarcherState karcher_gradient(const SpdMatrix& current,
                              const std::vector<SpdMatrix>& inverses,
                              const std::vector<double>& weights) {
  const SpdMatrix root = sqrtm(current);
  const Eigen::Index m = current.dim();
  KarcherState state{Eigen::MatrixXd::Zero(m, m), 0.0};
  for (std::size_t j = 0; j < inverses.size(); ++j) {
    if (weights[j] == 0.0) continue;
    const Eigen::MatrixXd log_term =
        logm(congruence(root.matrix(), inverses[j]));
    state.gradient += weights[j] * log_term;
    state.objective += weights[j] * log_term.squaredNorm();
  }
  return state;
}

}  // namespace

const char* to_string(FrechetMetric metric) {
  switch (metric) {
    case FrechetMetric::kBures:
      return "wasserstein";
    case FrechetMetric::kFisherRao:
      return "fisherrao";
    case FrechetMetric::kArithmetic:
      return "arithmetic";
    case FrechetMetric::kHarmonic:
      return "harmonic";
  }
  return "unknown";
}

void FrechetSpec::validate(std::size_t count) const {
  if (weights.size() != count) {
    std::ostringstream msg;
    msg << "expected " << count << " weights, got " << weights.size();
    throw DimensionError(msg.str());
  }
  double sum = 0.0;
  bool any_positive = false;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgumentError("weights must be finite and non-negative");
    }
    any_positive = any_positive || w > 0.0;
    sum += w;
  }
  if (!any_positive) throw InvalidArgumentError("all weights are zero");
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    std::ostringstream msg;
    msg << "weights must sum to 1 (sum=" << sum << ")";
    throw InvalidArgumentError(msg.str());
  }
  if (max_iter < 1) throw InvalidArgumentError("max_iter must be positive");
  if (!(step > 0.0)) throw InvalidArgumentError("step must be positive");
  if (!(rel_tol >= 0.0)) throw InvalidArgumentError("rel_tol must be >= 0");
  if (!(rel_trunc >= 0.0 && rel_trunc < 1.0)) {
    throw InvalidArgumentError("rel_trunc must lie in [0, 1)");
  }
}

MeanReport bures_barycenter(std::span<const SpdMatrix> sigmas,
                            const FrechetSpec& spec) {
  check_inputs(sigmas, spec);
  if (auto k = one_hot_index(spec.weights)) return {sigmas[*k], 0, 0.0};

  Eigen::MatrixXd current = sigmas[argmax_weight(spec.weights)].matrix();
  for (int evaluations = 1;; ++evaluations) {
    Eigen::MatrixXd next = bures_update(current, sigmas, spec);
    const double change = relative_frobenius(next, current);
    if (change < spec.rel_tol) {
      return {SpdMatrix(current), evaluations, change};
    }
    if (evaluations > spec.max_iter) {
      // Budget spent: this extra evaluation only measured the defect.
      return {SpdMatrix(current), spec.max_iter, change};
    }
    current = std::move(next);
  }
}

MeanReport karcher_mean(std::span<const SpdMatrix> sigmas,
                        const FrechetSpec& spec) {
  check_inputs(sigmas, spec);
  if (auto k = one_hot_index(spec.weights)) return {sigmas[*k], 0, 0.0};

  std::vector<SpdMatrix> inverses;
  inverses.reserve(sigmas.size());
  for (const SpdMatrix& s : sigmas) {
    try {
      inverses.push_back(inverse(s, spec.rel_trunc));
    } catch (const NumericError& e) {
      throw NumericError(std::string("Karcher mean: singular style covariance: ") +
                         e.what());
    }
  }

  const double tolerance =
      spec.rel_tol * static_cast<double>(sigmas.front().dim());
  double step = spec.step;
  SpdMatrix current = sigmas[argmax_weight(spec.weights)];
  KarcherState state = karcher_gradient(current, inverses, spec.weights);
  int iterations = 0;
  while (iterations < spec.max_iter && state.gradient.norm() >= tolerance) {
    ++iterations;
    const SpdMatrix root = sqrtm(current);
    SpdMatrix candidate =
        congruence(root.matrix(), expm(-step * state.gradient));
    KarcherState next = karcher_gradient(candidate, inverses, spec.weights);
    // Increases at rounding level are noise near the minimum, not overshoot.
    if (spec.backtracking &&
        next.objective > state.objective * (1.0 + kObjectiveNoise)) {
      step *= 0.5;
      continue;
    }
    current = std::move(candidate);
    state = std::move(next);
  }
  return {std::move(current), iterations, state.gradient.norm()};
}

MeanReport arithmetic_mean(std::span<const SpdMatrix> sigmas,
                           const FrechetSpec& spec) {
  check_inputs(sigmas, spec);
  if (auto k = one_hot_index(spec.weights)) return {sigmas[*k], 0, 0.0};
  const Eigen::Index m = sigmas.front().dim();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t j = 0; j < sigmas.size(); ++j) {
    sum += spec.weights[j] * sigmas[j].matrix();
  }
  return {SpdMatrix(sum), 0, 0.0};
}

MeanReport harmonic_mean(std::span<const SpdMatrix> sigmas,
                         const FrechetSpec& spec) {
  check_inputs(sigmas, spec);
  if (auto k = one_hot_index(spec.weights)) return {sigmas[*k], 0, 0.0};
  auto invert = [&](const SpdMatrix& s) {
    if (spec.allow_pseudo_inverse) return pinv(s, spec.rel_trunc);
    try {
      return inverse(s, spec.rel_trunc);
    } catch (const NumericError& e) {
      throw NumericError(
          std::string("harmonic mean of a singular covariance (enable the "
                      "pseudo-inverse variant to proceed): ") +
          e.what());
    }
  };
  const Eigen::Index m = sigmas.front().dim();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t j = 0; j < sigmas.size(); ++j) {
    if (spec.weights[j] == 0.0) continue;
    sum += spec.weights[j] * invert(sigmas[j]).matrix();
  }
  return {invert(SpdMatrix(sum)), 0, 0.0};
}

MeanReport frechet_mean(std::span<const SpdMatrix> sigmas,
                        const FrechetSpec& spec) {
  switch (spec.metric) {
    case FrechetMetric::kBures:
      return bures_barycenter(sigmas, spec);
    case FrechetMetric::kFisherRao:
      return karcher_mean(sigmas, spec);
    case FrechetMetric::kArithmetic:
      return arithmetic_mean(sigmas, spec);
    case FrechetMetric::kHarmonic:
      return harmonic_mean(sigmas, spec);
  }
  throw InvalidArgumentError("unknown Frechet metric");
}

StatsBarycenter barycenter_stats(std::span<const GaussianStats> styles,
                                 const std::optional<GaussianStats>& content,
                                 const FrechetSpec& spec) {
  if (styles.empty()) throw InvalidArgumentError("at least one style required");
  std::vector<GaussianStats> all(styles.begin(), styles.end());
  if (content) all.push_back(*content);
  spec.validate(all.size());

  std::vector<SpdMatrix> covs;
  covs.reserve(all.size());
  for (const GaussianStats& g : all) {
    if (g.dim() != all.front().dim()) {
      throw DimensionError("statistics to average have different dimensions");
    }
    covs.push_back(g.cov());
  }

  MeanReport report = frechet_mean(covs, spec);
  if (auto k = one_hot_index(spec.weights)) {
    return {GaussianStats(all[*k].mean(), report.result, 0), std::move(report)};
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(all.front().dim());
  for (std::size_t j = 0; j < all.size(); ++j) {
    mean += spec.weights[j] * all[j].mean();
  }
  return {GaussianStats(std::move(mean), report.result, 0), std::move(report)};
}

}  // namespace gaussot
