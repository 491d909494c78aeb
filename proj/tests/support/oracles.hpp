// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The hmsbl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// Dense reference computations used as test oracles. They use only Eigen and
// direct formulas so they share no code path with the library.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;

inline CMatrix random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = cplx(n(rng), n(rng));
  }
  return m;
}

// (A kron B)[i*rb + k, j*cb + l] = A[i,j] B[k,l]
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline CMatrix steering_matrix(const std::vector<double>& freqs, Index n) {
  CMatrix a(n, static_cast<Index>(freqs.size()));
  for (Index m = 0; m < a.cols(); ++m)
    for (Index p = 0; p < n; ++p) a(p, m) = std::exp(cplx(0.0, kPi * static_cast<double>(p) * freqs[m]));
  return a;
}

inline std::vector<double> linspace(int m, double lo = -1.0, double hi = 1.0) {
  std::vector<double> g(m);
  for (int i = 0; i < m; ++i) g[i] = lo + (hi - lo) * i / (m - 1);
  return g;
}

// Full prior covariance blkdiag(gamma_i B_i).
inline CMatrix prior(const RVector& gamma, const std::vector<CMatrix>& b) {
  const Index d = b.front().rows();
  CMatrix s = CMatrix::Zero(gamma.size() * d, gamma.size() * d);
  for (Index i = 0; i < gamma.size(); ++i) s.block(i * d, i * d, d, d) = gamma(i) * b[i];
  return s;
}

struct DensePosterior {
  CMatrix mu;
  CMatrix sigma;  // full (M d) x (M d)
};

// Gaussian conditioning of x ~ N(0, S0) on y = D x + n, n ~ N(0, lambda I).
inline DensePosterior posterior(const CMatrix& y, const CMatrix& d, const CMatrix& s0, double lambda) {
  const CMatrix sy = lambda * CMatrix::Identity(d.rows(), d.rows()) + d * s0 * d.adjoint();
  const CMatrix k = sy.partialPivLu().solve(d * s0);  // Sigma_y^{-1} D S0
  DensePosterior out;
  out.sigma = s0 - s0 * d.adjoint() * k;
  out.mu = (out.sigma * d.adjoint() * y) / lambda;
  return out;
}

// log det Sigma_y + tr(Sigma_y^{-1} Y Y^H / L), via LU.
inline double cost(const CMatrix& y, double num_snapshots, const CMatrix& d, const CMatrix& s0, double lambda) {
  const CMatrix sy = lambda * CMatrix::Identity(d.rows(), d.rows()) + d * s0 * d.adjoint();
  const auto lu = sy.partialPivLu();
  double logdet = 0.0;
  for (Index k = 0; k < sy.rows(); ++k) logdet += std::log(std::abs(lu.matrixLU()(k, k)));
  const CMatrix s = y * y.adjoint() / num_snapshots;
  return logdet + lu.solve(s).trace().real();
}

// Noise re-estimate written out with dense matrices:
// ||Y - D mu||^2 / (rows L) + lambda / n tr(P G P^H (P G P^H + lambda I)^{-1}).
inline double lambda_update(const CMatrix& y, double num_snapshots, const CMatrix& d, const CMatrix& mu,
                            const CMatrix& atoms, const RVector& gamma, double lambda) {
  const double rows = static_cast<double>(d.rows());
  const double residual = (y - d * mu).squaredNorm() / (rows * num_snapshots);
  CMatrix g = CMatrix::Zero(gamma.size(), gamma.size());
  for (Index i = 0; i < gamma.size(); ++i) g(i, i) = gamma(i);
  const CMatrix pgp = atoms * g * atoms.adjoint();
  const CMatrix inv = (pgp + lambda * CMatrix::Identity(pgp.rows(), pgp.rows())).inverse();
  return residual + lambda / static_cast<double>(atoms.rows()) * (pgp * inv).trace().real();
}

// Scalar EM-MSBL, written from the textbook updates:
//   Sigma_y = lambda I + Phi Gamma Phi^H
//   mu_i = gamma_i phi_i^H Sigma_y^{-1} Y
//   sigma_i = gamma_i - gamma_i^2 phi_i^H Sigma_y^{-1} phi_i
//   gamma_i <- sigma_i + ||mu_i||^2 / L
// Returns gamma after each iteration; no pruning.
inline std::vector<RVector> msbl_trajectory(const CMatrix& y, const CMatrix& phi, double lambda, int iters) {
  const double l = static_cast<double>(y.cols());
  const CMatrix s = y * y.adjoint() / l;
  const double init = s.norm() / (phi * phi.adjoint()).norm();
  RVector gamma = RVector::Constant(phi.cols(), init);
  std::vector<RVector> out;
  for (int t = 0; t < iters; ++t) {
    CMatrix sy = lambda * CMatrix::Identity(phi.rows(), phi.rows());
    for (Index i = 0; i < phi.cols(); ++i) sy += gamma(i) * phi.col(i) * phi.col(i).adjoint();
    const CMatrix w = sy.inverse();
    RVector next(phi.cols());
    for (Index i = 0; i < phi.cols(); ++i) {
      const auto p = phi.col(i);
      const Eigen::RowVectorXcd mu = gamma(i) * (p.adjoint() * w * y);
      const double sigma = gamma(i) - gamma(i) * gamma(i) * (p.adjoint() * w * p)(0, 0).real();
      next(i) = sigma + mu.squaredNorm() / l;
    }
    gamma = next;
    out.push_back(gamma);
  }
  return out;
}

inline double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace oracle
