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

#include "gaussot/psd_linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "gaussot/error.h"
#include "tridiagonal_eigen.h"

namespace gaussot {
namespace {

// Cheap condition proxy for diagnostics only: the solver failed, so no
// spectrum is available.
double diagonal_condition_estimate(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd d = m.diagonal().cwiseAbs();
  const double lo = d.minCoeff();
  return lo > 0.0 ? d.maxCoeff() / lo : std::numeric_limits<double>::infinity();
}

EigenDecomp solve_symmetric(const Eigen::MatrixXd& symmetric) {
  Eigen::VectorXd ascending;
  Eigen::MatrixXd vectors;
  if (!detail::symmetric_eigen(symmetric, ascending, vectors)) {
    std::ostringstream msg;
    msg << "symmetric eigen-solver did not converge (dim=" << symmetric.rows()
        << ", condition estimate=" << diagonal_condition_estimate(symmetric)
        << ")";
    throw NumericError(msg.str());
  }
  EigenDecomp out;
  out.values = ascending.reverse();
  out.vectors = vectors.rowwise().reverse();
  return out;
}

void check_square_finite(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw InvalidArgumentError("SpdMatrix requires a non-empty square matrix");
  }
  if (!m.allFinite()) {
    throw InvalidArgumentError("SpdMatrix entries must be finite");
  }
}

void check_same_dim(const SpdMatrix& a, const SpdMatrix& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << "dimension mismatch: " << a.dim() << " vs " << b.dim();
    throw DimensionError(msg.str());
  }
}

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& vectors,
                            const Eigen::VectorXd& values) {
  return symmetrize(vectors * values.asDiagonal() * vectors.transpose());
}

template <typename F>
Eigen::VectorXd map_values(const Eigen::VectorXd& w, F f) {
  Eigen::VectorXd out(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) out(i) = f(w(i));
  return out;
}

// Shared truncation rule for pseudo-inverse powers.
Eigen::VectorXd truncated_power(const Eigen::VectorXd& w, double rel_trunc,
                                double power) {
  if (rel_trunc < 0.0 || rel_trunc >= 1.0) {
    throw InvalidArgumentError("rel_trunc must lie in [0, 1)");
  }
  const double wmax = w(0);
  if (!(wmax > 0.0)) throw NumericError("zero-rank covariance");
  const double cut = rel_trunc * wmax;
  return map_values(w, [&](double v) {
    return (v <= 0.0 || v < cut) ? 0.0 : std::pow(v, power);
  });
}

}  // namespace

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

double relative_frobenius(const Eigen::MatrixXd& a,
                          const Eigen::MatrixXd& ref) {
  const double denom = ref.norm();
  const double diff = (a - ref).norm();
  return denom > 0.0 ? diff / denom : diff;
}

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& m) {
  check_square_finite(m);
  Eigen::MatrixXd sym = symmetrize(m);
  auto eig = std::make_shared<EigenDecomp>(solve_symmetric(sym));
  const double scale = std::max(eig->values(0), 0.0);
  const double band = -kNegativeEigenBand * scale;
  bool clamped = false;
  for (Eigen::Index i = 0; i < eig->values.size(); ++i) {
    const double v = eig->values(i);
    if (v >= 0.0) continue;
    if (v < band || scale == 0.0) {
      std::ostringstream msg;
      msg << "matrix is not positive semi-definite (eigenvalue " << v
          << ", lambda_max " << eig->values(0) << ")";
      throw NumericError(msg.str());
    }
    eig->values(i) = 0.0;
    clamped = true;
  }
  matrix_ = clamped ? reconstruct(eig->vectors, eig->values) : std::move(sym);
  eigen_ = std::move(eig);
}

SpdMatrix SpdMatrix::Identity(Eigen::Index dim) {
  if (dim <= 0) throw InvalidArgumentError("dimension must be positive");
  auto eig = std::make_shared<EigenDecomp>();
  eig->values = Eigen::VectorXd::Ones(dim);
  eig->vectors = Eigen::MatrixXd::Identity(dim, dim);
  return SpdMatrix(Eigen::MatrixXd::Identity(dim, dim), std::move(eig));
}

SpdMatrix SpdMatrix::Diagonal(const Eigen::VectorXd& diag) {
  if (diag.size() == 0) throw InvalidArgumentError("empty diagonal");
  if (!diag.allFinite() || diag.minCoeff() < 0.0) {
    throw InvalidArgumentError("diagonal entries must be finite and >= 0");
  }
  std::vector<Eigen::Index> order(diag.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto i, auto j) { return diag(i) > diag(j); });
  auto eig = std::make_shared<EigenDecomp>();
  eig->values.resize(diag.size());
  eig->vectors = Eigen::MatrixXd::Zero(diag.size(), diag.size());
  for (Eigen::Index k = 0; k < diag.size(); ++k) {
    eig->values(k) = diag(order[k]);
    eig->vectors(order[k], k) = 1.0;
  }
  Eigen::MatrixXd m = diag.asDiagonal();
  return SpdMatrix(std::move(m), std::move(eig));
}

SpdMatrix SpdMatrix::FromSpectrum(const Eigen::MatrixXd& vectors,
                                  const Eigen::VectorXd& values) {
  const Eigen::Index n = values.size();
  if (n == 0 || vectors.rows() != n || vectors.cols() != n) {
    throw DimensionError("spectrum and eigenvector shapes disagree");
  }
  if (!values.allFinite() || values.minCoeff() < 0.0) {
    throw NumericError("spectrum must be finite and non-negative");
  }
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto i, auto j) { return values(i) > values(j); });
  auto eig = std::make_shared<EigenDecomp>();
  eig->values.resize(n);
  eig->vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    eig->values(k) = values(order[k]);
    eig->vectors.col(k) = vectors.col(order[k]);
  }
  Eigen::MatrixXd m = reconstruct(eig->vectors, eig->values);
  return SpdMatrix(std::move(m), std::move(eig));
}

EigenDecomp sym_eigen(const Eigen::MatrixXd& symmetric) {
  check_square_finite(symmetric);
  return solve_symmetric(symmetrize(symmetric));
}

EigenDecomp sym_eigen(const SpdMatrix& a) { return a.eigen(); }

SpdMatrix sqrtm(const SpdMatrix& a) {
  const EigenDecomp& e = a.eigen();
  return SpdMatrix::FromSpectrum(
      e.vectors, map_values(e.values, [](double v) { return std::sqrt(v); }));
}

SpdMatrix inv_sqrtm(const SpdMatrix& a, double rel_trunc) {
  const EigenDecomp& e = a.eigen();
  return SpdMatrix::FromSpectrum(e.vectors,
                                 truncated_power(e.values, rel_trunc, -0.5));
}

SpdMatrix pinv(const SpdMatrix& a, double rel_trunc) {
  const EigenDecomp& e = a.eigen();
  return SpdMatrix::FromSpectrum(e.vectors,
                                 truncated_power(e.values, rel_trunc, -1.0));
}

SpdMatrix inverse(const SpdMatrix& a, double rel_trunc) {
  const EigenDecomp& e = a.eigen();
  if (!(a.min_eigenvalue() > 0.0) ||
      a.min_eigenvalue() < rel_trunc * a.max_eigenvalue()) {
    std::ostringstream msg;
    msg << "singular matrix (lambda_min " << a.min_eigenvalue()
        << ", lambda_max " << a.max_eigenvalue() << ")";
    throw NumericError(msg.str());
  }
  return SpdMatrix::FromSpectrum(
      e.vectors, map_values(e.values, [](double v) { return 1.0 / v; }));
}

Eigen::MatrixXd logm(const SpdMatrix& a, double rel_floor) {
  const EigenDecomp& e = a.eigen();
  if (!(rel_floor > 0.0)) throw InvalidArgumentError("rel_floor must be > 0");
  if (!(a.min_eigenvalue() > 0.0) ||
      a.min_eigenvalue() < rel_floor * a.max_eigenvalue()) {
    std::ostringstream msg;
    msg << "log of near-singular matrix (lambda_min " << a.min_eigenvalue()
        << ", lambda_max " << a.max_eigenvalue() << ")";
    throw NumericError(msg.str());
  }
  return reconstruct(e.vectors,
                     map_values(e.values, [](double v) { return std::log(v); }));
}

SpdMatrix expm(const Eigen::MatrixXd& s) {
  const EigenDecomp e = sym_eigen(s);
  return SpdMatrix::FromSpectrum(
      e.vectors, map_values(e.values, [](double v) { return std::exp(v); }));
}

SpdMatrix congruence(const Eigen::MatrixXd& outer, const SpdMatrix& inner) {
  if (outer.cols() != inner.dim()) {
    throw DimensionError("congruence: inner dimension mismatch");
  }
  return SpdMatrix(outer * inner.matrix() * outer.transpose());
}

double bures_distance_sq(const SpdMatrix& a, const SpdMatrix& b) {
  check_same_dim(a, b);
  // Exact zero for identical inputs instead of a rounding residue.
  if (a.matrix() == b.matrix()) return 0.0;
  const SpdMatrix root_a = sqrtm(a);
  const SpdMatrix middle = congruence(root_a.matrix(), b);
  const double cross = middle.eigen().values.cwiseSqrt().sum();
  return std::max(0.0, a.trace() + b.trace() - 2.0 * cross);
}

double fisher_rao_distance_sq(const SpdMatrix& a, const SpdMatrix& b,
                              double rel_floor) {
  check_same_dim(a, b);
  for (const SpdMatrix* x : {&a, &b}) {
    if (!(x->min_eigenvalue() > 0.0) ||
        x->min_eigenvalue() < rel_floor * x->max_eigenvalue()) {
      throw NumericError("Fisher-Rao distance of near-singular matrix");
    }
  }
  if (a.matrix() == b.matrix()) return 0.0;
  const SpdMatrix whitened = congruence(inv_sqrtm(a, 0.0).matrix(), b);
  const Eigen::VectorXd& w = whitened.eigen().values;
  if (!(w.minCoeff() > 0.0)) {
    throw NumericError("Fisher-Rao distance of near-singular matrix");
  }
  return w.array().log().square().sum();
}

double frobenius_distance_sq(const SpdMatrix& a, const SpdMatrix& b) {
  check_same_dim(a, b);
  return (a.matrix() - b.matrix()).squaredNorm();
}

}  // namespace gaussot
