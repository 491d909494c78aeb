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


#include "hmsbl/dictionary.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace hmsbl {

Grid1D uniform_grid(int m, double lo, double hi) {
  if (m < 2) throw ArgumentError("uniform grid needs at least 2 points, got " + std::to_string(m));
  if (!(lo < hi)) throw ArgumentError("uniform grid needs lo < hi");
  if (lo < -1.0 || hi > 1.0) throw ArgumentError("uniform grid must lie within [-1, 1]");
  Grid1D g;
  g.points.resize(static_cast<std::size_t>(m));
  const double step = (hi - lo) / (m - 1);
  for (int i = 0; i < m; ++i) g.points[static_cast<std::size_t>(i)] = lo + step * i;
  g.points.back() = hi;
  return g;
}

CVector steering(double freq, int n) {
  if (n < 1) throw ArgumentError("steering vector needs n >= 1");
  CVector a(n);
  for (int p = 0; p < n; ++p) a(p) = std::polar(1.0, std::numbers::pi * p * freq);
  return a;
}

CMatrix steering_matrix(const Grid1D& grid, int n) {
  CMatrix out(n, grid.size());
  for (Index m = 0; m < grid.size(); ++m) out.col(m) = steering(grid[m], n);
  return out;
}

DictionaryPair DictionaryPair::build(const UraConfig& array, Grid1D grid_u, Grid1D grid_v) {
  array.validate();
  DictionaryPair pair;
  pair.phi_u = steering_matrix(grid_u, array.nx);
  pair.phi_v = steering_matrix(grid_v, array.ny);
  pair.grid_u = std::move(grid_u);
  pair.grid_v = std::move(grid_v);
  return pair;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out = Eigen::kroneckerProduct(a, b);
  return out;
}

CMatrix effective_dictionary(const CMatrix& phi_u, int ny) {
  if (ny < 1) throw ArgumentError("effective dictionary needs ny >= 1");
  return kron(phi_u, CMatrix::Identity(ny, ny));
}

KronDictionary kron_dictionary(const DictionaryPair& pair, bool prune) {
  const Index mu = pair.grid_u.size();
  const Index mv = pair.grid_v.size();
  const Index nx = pair.phi_u.rows();
  const Index ny = pair.phi_v.rows();

  KronDictionary kd;
  kd.labels.reserve(static_cast<std::size_t>(mu * mv));
  std::vector<std::pair<Index, Index>> keep;
  keep.reserve(static_cast<std::size_t>(mu * mv));
  for (Index m = 0; m < mu; ++m) {
    for (Index n = 0; n < mv; ++n) {
      const Source label{pair.grid_u[m], pair.grid_v[n]};
      if (prune && !label.feasible()) continue;
      keep.emplace_back(m, n);
      kd.labels.push_back(label);
    }
  }

  kd.matrix.resize(nx * ny, static_cast<Index>(keep.size()));
  for (Index p = 0; p < static_cast<Index>(keep.size()); ++p) {
    const auto [m, n] = keep[static_cast<std::size_t>(p)];
    for (Index ix = 0; ix < nx; ++ix) {
      kd.matrix.col(p).segment(ix * ny, ny) = pair.phi_u(ix, m) * pair.phi_v.col(n);
    }
  }
  return kd;
}

double kron_factorization_check(const CMatrix& phi_u, const CMatrix& phi_v) {
  const CMatrix lhs = kron(phi_u, CMatrix::Identity(phi_v.rows(), phi_v.rows())) *
                      kron(CMatrix::Identity(phi_u.cols(), phi_u.cols()), phi_v);
  const CMatrix rhs = kron(phi_u, phi_v);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

namespace {

// (outer*d) x c  ->  outer x (d*c), element (o*d + k, c) -> (o, k + d*c).
CMatrix to_block_layout(const CMatrix& z, Index outer, Index d) {
  CMatrix out(outer, d * z.cols());
  for (Index c = 0; c < z.cols(); ++c) {
    for (Index k = 0; k < d; ++k) {
      for (Index o = 0; o < outer; ++o) out(o, k + d * c) = z(o * d + k, c);
    }
  }
  return out;
}

CMatrix from_block_layout(const CMatrix& r, Index d) {
  const Index outer = r.rows();
  const Index cols = r.cols() / d;
  CMatrix out(outer * d, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index k = 0; k < d; ++k) {
      for (Index o = 0; o < outer; ++o) out(o * d + k, c) = r(o, k + d * c);
    }
  }
  return out;
}

}  // namespace

CMatrix BlockDictionary::apply(const CMatrix& x) const {
  if (x.rows() != blocks() * block_size) throw ArgumentError("BlockDictionary::apply: size mismatch");
  if (block_size == 1) return atoms * x;
  return from_block_layout(atoms * to_block_layout(x, blocks(), block_size), block_size);
}

CMatrix BlockDictionary::apply_adjoint(const CMatrix& z) const {
  if (z.rows() != rows()) throw ArgumentError("BlockDictionary::apply_adjoint: size mismatch");
  if (block_size == 1) return atoms.adjoint() * z;
  return from_block_layout(atoms.adjoint() * to_block_layout(z, atoms.rows(), block_size),
                           block_size);
}

double BlockDictionary::gram_frobenius() const {
  const CMatrix g = atoms * atoms.adjoint();
  return g.norm() * std::sqrt(static_cast<double>(block_size));
}

}  // namespace hmsbl
