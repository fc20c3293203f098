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

// Symmetric eigensolver for medium and large matrices: Householder
// tridiagonalization followed by Cuppen's divide and conquer on the
// tridiagonal, with Gu-Eisenstat eigenvectors for orthogonality.

#ifndef GAUSSOT_SRC_TRIDIAGONAL_EIGEN_H_
#define GAUSSOT_SRC_TRIDIAGONAL_EIGEN_H_

#include <Eigen/Core>

namespace gaussot::detail {

// Eigenpairs of the symmetric tridiagonal matrix with diagonal `d` and
// sub-diagonal `e`, eigenvalues ascending. Returns false if a leaf solve
// failed to converge.
bool tridiagonal_eigen(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                       Eigen::VectorXd& values, Eigen::MatrixXd& vectors);

// Eigenpairs of a symmetric matrix (lower triangle referenced), ascending.
bool symmetric_eigen(const Eigen::MatrixXd& a, Eigen::VectorXd& values,
                     Eigen::MatrixXd& vectors);

}  // namespace gaussot::detail

#endif  // GAUSSOT_SRC_TRIDIAGONAL_EIGEN_H_
