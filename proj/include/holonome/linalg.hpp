// Copyright 2026 The Holonome Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <complex>

#include "holonome/config.hpp"

namespace holonome {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Matrix dagger(const Matrix& m) { return m.adjoint(); }

/** ||U U^dag - I||_max, zero for exactly unitary U. */
inline double unitarity_defect(const Matrix& u) {
  Matrix d = u * u.adjoint() - Matrix::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

/**
 * Equality up to global phase, as F(U,V) = |Tr(U^dag V)| / dim.
 * F == 1 exactly when U = e^{i phi} V.
 */
inline double phase_fidelity(const Matrix& u, const Matrix& v) {
  return std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
}

/** Max entrywise deviation after aligning V's global phase to U. */
inline double phase_aligned_distance(const Matrix& u, const Matrix& v) {
  Complex tr = (u.adjoint() * v).trace();
  Complex phase = std::abs(tr) > 1e-14 ? tr / std::abs(tr) : Complex(1.0);
  return (u * phase - v).cwiseAbs().maxCoeff();
}

/** Unitary factor of the polar decomposition M = U P (P >= 0). */
inline Matrix polar_unitary(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

/** exp(-i t H) for Hermitian H via spectral decomposition. */
inline Matrix expm_i_hermitian(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases = (-kI * t * es.eigenvalues().cast<Complex>().array()).exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace holonome
