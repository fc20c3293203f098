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

// Dense symmetric positive semi-definite matrices and the spectral matrix
// functions used by the transport and averaging code.
//
// Every matrix function goes through a symmetric eigendecomposition. An
// SpdMatrix caches its decomposition at construction, so chains such as
// sqrtm -> inv_sqrtm on the same operand decompose once.

#ifndef GAUSSOT_PSD_LINALG_H_
#define GAUSSOT_PSD_LINALG_H_

#include <memory>

#include <Eigen/Dense>

namespace gaussot {

inline constexpr double kDefaultRelTrunc = 1e-7;
inline constexpr double kDefaultRelFloor = 1e-10;

// Eigenvalues in (-kNegativeEigenBand * lambda_max, 0) are treated as
// round-off and clamped to zero; anything more negative is rejected.
inline constexpr double kNegativeEigenBand = 1e-10;

struct EigenDecomp {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // column eigenvectors, orthonormal
};

class SpdMatrix {
 public:
  // Symmetrizes `m`, then validates it spectrally. Throws
  // InvalidArgumentError for empty, non-square or non-finite input and
  // NumericError for genuinely indefinite input.
  explicit SpdMatrix(const Eigen::MatrixXd& m);

  static SpdMatrix Identity(Eigen::Index dim);
  static SpdMatrix Diagonal(const Eigen::VectorXd& diag);

  // Builds V diag(values) V^T from orthonormal columns V. The decomposition
  // is kept as the cached spectrum, so no eigen-solve happens here.
  static SpdMatrix FromSpectrum(const Eigen::MatrixXd& vectors,
                                const Eigen::VectorXd& values);

  Eigen::Index dim() const { return matrix_.rows(); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const EigenDecomp& eigen() const { return *eigen_; }
  double trace() const { return matrix_.trace(); }
  double max_eigenvalue() const { return eigen_->values(0); }
  double min_eigenvalue() const {
    return eigen_->values(eigen_->values.size() - 1);
  }

 private:
  SpdMatrix(Eigen::MatrixXd m, std::shared_ptr<const EigenDecomp> eig)
      : matrix_(std::move(m)), eigen_(std::move(eig)) {}

  Eigen::MatrixXd matrix_;
  std::shared_ptr<const EigenDecomp> eigen_;
};

// Decomposes a symmetric matrix (not necessarily PSD). Values descending.
// Throws NumericError if the solver fails to converge.
EigenDecomp sym_eigen(const Eigen::MatrixXd& symmetric);
EigenDecomp sym_eigen(const SpdMatrix& a);

SpdMatrix sqrtm(const SpdMatrix& a);

// Pseudo-inverse square root: eigenvalues below rel_trunc * lambda_max map
// to zero. Throws NumericError("zero-rank covariance") when nothing is kept.
SpdMatrix inv_sqrtm(const SpdMatrix& a, double rel_trunc = kDefaultRelTrunc);

// Truncated pseudo-inverse with the same rule as inv_sqrtm.
SpdMatrix pinv(const SpdMatrix& a, double rel_trunc = kDefaultRelTrunc);

// Inverse of a full-rank matrix; throws NumericError when any eigenvalue
// falls below rel_trunc * lambda_max.
SpdMatrix inverse(const SpdMatrix& a, double rel_trunc = kDefaultRelTrunc);

// Symmetric matrix logarithm. Requires lambda_min >= rel_floor * lambda_max.
Eigen::MatrixXd logm(const SpdMatrix& a, double rel_floor = kDefaultRelFloor);

// Exponential of a symmetric matrix.
SpdMatrix expm(const Eigen::MatrixXd& s);

// outer * inner * outer^T, re-symmetrized.
SpdMatrix congruence(const Eigen::MatrixXd& outer, const SpdMatrix& inner);

// tr(a + b - 2 (a^1/2 b a^1/2)^1/2), clamped at zero.
double bures_distance_sq(const SpdMatrix& a, const SpdMatrix& b);

// ||log(a^-1/2 b a^-1/2)||_F^2 (affine-invariant metric).
double fisher_rao_distance_sq(const SpdMatrix& a, const SpdMatrix& b,
                              double rel_floor = kDefaultRelFloor);

// ||a - b||_F^2.
double frobenius_distance_sq(const SpdMatrix& a, const SpdMatrix& b);

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m);

// ||a - ref||_F / ||ref||_F, or ||a||_F when ref is zero.
double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref);

}  // namespace gaussot

#endif  // GAUSSOT_PSD_LINALG_H_
