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

#include <vector>

#include "hmsbl/signal_model.hpp"
#include "hmsbl/types.hpp"

namespace hmsbl {

/// Strictly increasing candidate frequencies in [-1, 1].
struct Grid1D {
  std::vector<double> points;

  Index size() const { return static_cast<Index>(points.size()); }
  double operator[](Index i) const { return points[static_cast<std::size_t>(i)]; }
};

/// m equally spaced points from lo to hi, both endpoints included.
Grid1D uniform_grid(int m, double lo = -1.0, double hi = 1.0);

/// [1, e^{j pi f}, ..., e^{j pi (n-1) f}]^T
CVector steering(double freq, int n);

/// Columns are steering(grid[m], n).
CMatrix steering_matrix(const Grid1D& grid, int n);

/// The two 1-D dictionaries of a URA together with their grids.
struct DictionaryPair {
  CMatrix phi_u;  // nx x Mu
  CMatrix phi_v;  // ny x Mv
  Grid1D grid_u;
  Grid1D grid_v;

  static DictionaryPair build(const UraConfig& array, Grid1D grid_u, Grid1D grid_v);

  int nx() const { return static_cast<int>(phi_u.rows()); }
  int ny() const { return static_cast<int>(phi_v.rows()); }
};

/// Dense Phi_u kron I_ny. Only for small problems and tests; the solver
/// works with the block operator in BlockDictionary instead.
CMatrix effective_dictionary(const CMatrix& phi_u, int ny);

/// 2-D dictionary with one labelled column per (u, v) grid pair.
struct KronDictionary {
  CMatrix matrix;              // (nx*ny) x P
  std::vector<Source> labels;  // column labels, length P

  Index columns() const { return matrix.cols(); }
};

/// Columns enumerate (u_m, v_n) with the v index fastest, matching vec(S^T).
/// With `prune`, pairs with u^2 + v^2 > 1 are dropped.
KronDictionary kron_dictionary(const DictionaryPair& pair, bool prune);

/// Dense Kronecker product.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// max |(Phi_u kron I)(I kron Phi_v) - Phi_u kron Phi_v|, a self-test of the
/// mixed-product identity the remodeled data model rests on.
double kron_factorization_check(const CMatrix& phi_u, const CMatrix& phi_v);

/// Dictionary of the form D = atoms kron I_d, with `atoms` of size n x M.
///
/// Block i of the unknown (rows i*d .. i*d+d-1) multiplies atoms.col(i) kron I_d.
/// The H-MSBL model uses atoms = Phi_u, d = ny; block size 1 with the 2-D
/// Kronecker dictionary gives the classic MSBL model.
struct BlockDictionary {
  CMatrix atoms;
  int block_size = 1;

  static BlockDictionary hmsbl(const DictionaryPair& pair) { return {pair.phi_u, pair.ny()}; }
  static BlockDictionary msbl(const KronDictionary& kd) { return {kd.matrix, 1}; }

  Index rows() const { return atoms.rows() * block_size; }
  Index blocks() const { return atoms.cols(); }

  /// D x for x of size (M*d) x c.
  CMatrix apply(const CMatrix& x) const;
  /// D^H z for z of size (n*d) x c.
  CMatrix apply_adjoint(const CMatrix& z) const;
  /// Dense D; small problems only.
  CMatrix dense() const { return effective_dictionary(atoms, block_size); }
  /// ||D D^H||_F without forming D.
  double gram_frobenius() const;
};

}  // namespace hmsbl
