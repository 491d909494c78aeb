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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace hmsbl {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Input outside the mathematical domain of an operation (angles, direction cosines).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed call arguments: sizes, counts, inconsistent shapes.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input for which the algorithm is undefined (e.g. all-zero data).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside an iterative solver. Carries the iteration at
/// which it occurred (-1 when outside the main loop).
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iteration = -1);
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace hmsbl
