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

#include "tridiagonal_eigen.h"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace gaussot::detail {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Below this size the implicit QR solver is faster than splitting.
constexpr Index kLeafSize = 32;
constexpr Index kDivideThreshold = 64;
constexpr int kMaxSecularIterations = 100;

// Root of the secular equation 1 + rho * sum_i z_i^2 / (d_i - lambda) = 0
// in the j-th interval, stored relative to its nearest pole so that the
// differences d_i - lambda are computed without cancellation.
struct SecularRoot {
  Index origin = 0;
  double tau = 0.0;
};

class SecularEquation {
 public:
  SecularEquation(const VectorXd& d, const VectorXd& z, double rho)
      : d_(d), z2_(z.cwiseAbs2()), rho_(rho) {}

  SecularRoot solve(Index j) const {
    const Index k = d_.size();
    const bool last = j == k - 1;
    SecularRoot root;
    double lo;
    double hi;
    if (last) {
      root.origin = j;
      lo = 0.0;
      hi = rho_ * z2_.sum();
    } else {
      const double gap = d_(j + 1) - d_(j);
      root.origin = j;
      if (evaluate(j, j, 0.5 * gap).f >= 0.0) {
        lo = 0.0;
        hi = 0.5 * gap;
      } else {
        root.origin = j + 1;
        lo = -0.5 * gap;
        hi = 0.0;
      }
    }
    const double a = d_(j) - d_(root.origin);
    const double b = last ? 0.0 : d_(j + 1) - d_(root.origin);

    double tau = root.origin == j ? hi : lo;
    for (int iter = 0; iter < kMaxSecularIterations; ++iter) {
      const Terms t = evaluate(j, root.origin, tau);
      if (t.f == 0.0) break;
      (t.f < 0.0 ? lo : hi) = tau;
      if (std::abs(t.f) <= 8.0 * kEps * static_cast<double>(k) * t.scale ||
          hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) {
        break;
      }
      // Fit c + q / (a - x) + s / (b - x) through the value and derivative of
      // the left and right pole groups, and step to its root.
      const double da = a - tau;
      const double q = t.left_slope * da * da;
      double eta;
      if (last) {
        const double c = 1.0 + t.left - q / da + t.right;
        eta = c > 0.0 ? da + q / c : std::numeric_limits<double>::quiet_NaN();
      } else {
        const double db = b - tau;
        const double s = t.right_slope * db * db;
        const double c = 1.0 + (t.left - q / da) + (t.right - s / db);
        eta = model_step(c, q, s, da, db, t.f);
      }
      double next = tau + eta;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == tau) break;
      tau = next;
    }
    root.tau = tau;
    return root;
  }

 private:
  struct Terms {
    double f = 0.0;
    double left = 0.0;
    double right = 0.0;
    double left_slope = 0.0;
    double right_slope = 0.0;
    double scale = 0.0;
  };

  // Poles at or left of d_j form the left group, the rest the right group.
  Terms evaluate(Index j, Index origin, double tau) const {
    Terms t;
    const double base = d_(origin);
    for (Index i = 0; i < d_.size(); ++i) {
      const double delta = (d_(i) - base) - tau;
      const double term = rho_ * z2_(i) / delta;
      const double slope = term / delta;
      if (i <= j) {
        t.left += term;
        t.left_slope += slope;
      } else {
        t.right += term;
        t.right_slope += slope;
      }
    }
    t.f = 1.0 + t.left + t.right;
    t.scale = 1.0 + std::abs(t.left) + std::abs(t.right);
    return t;
  }

  // Root in eta of c (da - eta)(db - eta) + q (db - eta) + s (da - eta) = 0,
  // whose constant term equals da * db * f.
  static double model_step(double c, double q, double s, double da, double db,
                           double f) {
    const double a1 = c * (da + db) + q + s;
    const double a0 = da * db * f;
    if (c == 0.0) return a0 / a1;
    const double disc = std::sqrt(std::max(a1 * a1 - 4.0 * c * a0, 0.0));
    const double big = 0.5 * (a1 + std::copysign(disc, a1)) / c;
    const double small = big != 0.0 ? a0 / (c * big) : 0.0;
    // The model is increasing between its poles, so its root in (da, db)
    // shifted coordinates is the one with da - eta < 0 < db - eta.
    auto inside = [&](double eta) { return da - eta < 0.0 && db - eta > 0.0; };
    if (inside(small)) return small;
    if (inside(big)) return big;
    return std::numeric_limits<double>::quiet_NaN();
  }

  const VectorXd& d_;
  VectorXd z2_;
  double rho_;
};

// Applies `order` to entries of `v` and columns of `q`.
void permute(const std::vector<Index>& order, VectorXd& v, MatrixXd& q) {
  VectorXd pv(v.size());
  MatrixXd pq(q.rows(), q.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    pv(static_cast<Index>(i)) = v(order[i]);
    pq.col(static_cast<Index>(i)) = q.col(order[i]);
  }
  v = std::move(pv);
  q = std::move(pq);
}

std::vector<Index> ascending_order(const VectorXd& v) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return v(a) < v(b); });
  return order;
}

// Eigenpairs of Q (diag(d) + rho z z^T) Q^T for rho >= 0 and unit z, where
// Q = diag(Q1, Q2) with Q1 covering the first `split` rows.
void rank_one_update(VectorXd d, VectorXd z, double rho, MatrixXd q,
                     Index split, VectorXd& values, MatrixXd& vectors) {
  const Index n = d.size();
  // Which diagonal block(s) each column of q has support in.
  std::vector<unsigned char> support(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    support[static_cast<std::size_t>(i)] = i < split ? 1 : 2;
  }
  std::vector<Index> order = ascending_order(d);
  {
    VectorXd pz(n);
    std::vector<unsigned char> ps(support.size());
    for (Index i = 0; i < n; ++i) {
      const std::size_t src = static_cast<std::size_t>(order[static_cast<std::size_t>(i)]);
      pz(i) = z(static_cast<Index>(src));
      ps[static_cast<std::size_t>(i)] = support[src];
    }
    z = std::move(pz);
    support = std::move(ps);
    permute(order, d, q);
  }

  // Deflation: negligible components of z, and near-equal diagonal entries
  // whose z components a rotation can merge.
  const double tol = 8.0 * kEps * std::max(d.cwiseAbs().maxCoeff(), rho);
  std::vector<Index> kept;
  for (Index i = 0; i < n; ++i) {
    if (rho * std::abs(z(i)) <= tol) continue;
    if (!kept.empty()) {
      const Index p = kept.back();
      const double r = std::hypot(z(p), z(i));
      const double c = z(i) / r;
      const double s = z(p) / r;
      if (std::abs(c * s * (d(i) - d(p))) <= tol) {
        const double dp = c * c * d(p) + s * s * d(i);
        const double di = s * s * d(p) + c * c * d(i);
        d(p) = dp;
        d(i) = di;
        z(p) = 0.0;
        z(i) = r;
        const VectorXd qp = q.col(p);
        q.col(p) = c * qp - s * q.col(i);
        q.col(i) = s * qp + c * q.col(i);
        const auto both = static_cast<unsigned char>(
            support[static_cast<std::size_t>(p)] | support[static_cast<std::size_t>(i)]);
        support[static_cast<std::size_t>(p)] = both;
        support[static_cast<std::size_t>(i)] = both;
        kept.pop_back();
      }
    }
    kept.push_back(i);
  }

  values = d;
  vectors = std::move(q);
  const Index k = static_cast<Index>(kept.size());
  if (k == 1) {
    values(kept[0]) += rho * z(kept[0]) * z(kept[0]);
  } else if (k > 1) {
    VectorXd dk(k);
    VectorXd zk(k);
    for (Index i = 0; i < k; ++i) {
      dk(i) = d(kept[static_cast<std::size_t>(i)]);
      zk(i) = z(kept[static_cast<std::size_t>(i)]);
    }
    const SecularEquation secular(dk, zk, rho);
    // delta(i, j) = dk_i - lambda_j.
    MatrixXd delta(k, k);
    for (Index j = 0; j < k; ++j) {
      const SecularRoot root = secular.solve(j);
      const double base = dk(root.origin);
      for (Index i = 0; i < k; ++i) delta(i, j) = (dk(i) - base) - root.tau;
      values(kept[static_cast<std::size_t>(j)]) = base + root.tau;
    }
    // Recompute z from the computed roots so the eigenvectors are
    // numerically orthogonal (Gu and Eisenstat).
    VectorXd zhat(k);
    for (Index i = 0; i < k; ++i) {
      double w = delta(i, i);
      for (Index j = 0; j < k; ++j) {
        if (j != i) w *= delta(i, j) / (dk(i) - dk(j));
      }
      zhat(i) = std::copysign(std::sqrt(std::abs(w)), zk(i));
    }
    MatrixXd v(k, k);
    for (Index j = 0; j < k; ++j) {
      v.col(j) = zhat.cwiseQuotient(delta.col(j));
      v.col(j).normalize();
    }
    // Multiply block by block, skipping the zero parts of the kept columns.
    auto block_product = [&](unsigned char part, Index row0, Index rows) {
      std::vector<Index> cols;
      for (Index i = 0; i < k; ++i) {
        if (support[static_cast<std::size_t>(kept[static_cast<std::size_t>(i)])] & part) {
          cols.push_back(i);
        }
      }
      const Index c = static_cast<Index>(cols.size());
      MatrixXd qs(rows, c);
      MatrixXd vs(c, k);
      for (Index i = 0; i < c; ++i) {
        const Index col = cols[static_cast<std::size_t>(i)];
        qs.col(i) = vectors.col(kept[static_cast<std::size_t>(col)]).segment(row0, rows);
        vs.row(i) = v.row(col);
      }
      return MatrixXd(qs * vs);
    };
    const MatrixXd top = block_product(1, 0, split);
    const MatrixXd bottom = block_product(2, split, n - split);
    for (Index j = 0; j < k; ++j) {
      auto col = vectors.col(kept[static_cast<std::size_t>(j)]);
      col.head(split) = top.col(j);
      col.tail(n - split) = bottom.col(j);
    }
  }
  permute(ascending_order(values), values, vectors);
}

bool solve_tridiagonal(const VectorXd& d, const VectorXd& e, VectorXd& values,
                       MatrixXd& vectors) {
  const Index n = d.size();
  if (n <= kLeafSize) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver;
    solver.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) return false;
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
    return true;
  }
  // T = diag(T1', T2') + rho w w^T with w = (e_last; sign(beta) e_first).
  const Index k = n / 2;
  const double beta = e(k - 1);
  const double rho = std::abs(beta);
  VectorXd d1 = d.head(k);
  VectorXd d2 = d.tail(n - k);
  d1(k - 1) -= rho;
  d2(0) -= rho;
  VectorXd w1;
  VectorXd w2;
  MatrixXd q1;
  MatrixXd q2;
  if (!solve_tridiagonal(d1, e.head(k - 1), w1, q1) ||
      !solve_tridiagonal(d2, e.tail(n - k - 1), w2, q2)) {
    return false;
  }
  VectorXd dd(n);
  dd << w1, w2;
  VectorXd z(n);
  z.head(k) = q1.row(k - 1).transpose();
  z.tail(n - k) = (beta < 0.0 ? -1.0 : 1.0) * q2.row(0).transpose();
  MatrixXd q = MatrixXd::Zero(n, n);
  q.topLeftCorner(k, k) = q1;
  q.bottomRightCorner(n - k, n - k) = q2;
  // z has norm sqrt(2); fold that into rho.
  rank_one_update(std::move(dd), z / std::sqrt(2.0), 2.0 * rho, std::move(q), k,
                  values, vectors);
  return true;
}

}  // namespace

bool tridiagonal_eigen(const VectorXd& d, const VectorXd& e, VectorXd& values,
                       MatrixXd& vectors) {
  const Index n = d.size();
  double scale = d.cwiseAbs().maxCoeff();
  if (n > 1) scale = std::max(scale, e.cwiseAbs().maxCoeff());
  if (scale == 0.0) {
    values = VectorXd::Zero(n);
    vectors = MatrixXd::Identity(n, n);
    return true;
  }
  if (!solve_tridiagonal(d / scale, e / scale, values, vectors)) return false;
  values *= scale;
  return true;
}

bool symmetric_eigen(const MatrixXd& a, VectorXd& values, MatrixXd& vectors) {
  if (a.rows() < kDivideThreshold) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) return false;
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
    return true;
  }
  const Eigen::Tridiagonalization<MatrixXd> tri(a);
  const VectorXd d = tri.diagonal();
  const VectorXd e = tri.subDiagonal();
  if (!tridiagonal_eigen(d, e, values, vectors)) return false;
  vectors.applyOnTheLeft(tri.matrixQ());
  return true;
}

}  // namespace gaussot::detail
