// Copyright 2026 The dfreg Authors
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

#ifndef DFREG_BASIS_HPP_
#define DFREG_BASIS_HPP_

#include <string>
#include <vector>

#include "dfreg/rotations.hpp"

namespace dfreg {

// Highest per-coordinate degree is kMaxLegendreDegree (12 functions).
inline constexpr int kMaxLegendreDegree = 11;

// Orthonormal shifted Legendre polynomial on [0,1]:
// sqrt(2 deg + 1) P_deg(2t - 1). Degree 0 is the constant 1.
double legendre_shifted(int degree, double t);

// Closed-form antiderivative from 0: integral_0^t legendre_shifted(degree, s) ds.
double legendre_shifted_integral(int degree, double t);

// Orthonormal reference system r_k on [0,1]^p built from tensor products
// of shifted Legendre polynomials.
//
// Multi-degrees are enumerated by total degree, and within one total degree
// in decreasing lexicographic order: for p = 2 that is
// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
// so r_0 = 1 always. Indices are zero-based.
class ReferenceBasis {
 public:
  int dim() const { return p_; }
  int count() const { return static_cast<int>(degrees_.size()); }
  const std::vector<int>& degrees(int k) const { return degrees_[k]; }

  // r_k(x); x has length p with coordinates in [0,1].
  double value(int k, const Vector& x) const;
  // Q_k(x) = integral of r_k over the box [0, x].
  double cumulative(int k, const Vector& x) const;

  // e.g. "legendre(p=2,d=4):(0,0)(1,0)(0,1)(2,0)"; reported with results.
  std::string describe() const;

 private:
  friend ReferenceBasis make_basis(int p, int d);
  ReferenceBasis(int p, std::vector<std::vector<int>> degrees)
      : p_(p), degrees_(std::move(degrees)) {}

  int p_;
  std::vector<std::vector<int>> degrees_;
};

// First d functions of the tensor-product Legendre system on [0,1]^p.
// Throws DomainError when d exceeds the (kMaxLegendreDegree + 1)^p available.
ReferenceBasis make_basis(int p, int d);

// Vectors r_{k,i} = r_k(points_i) / sqrt(n), orthonormalized exactly at the
// given n (first, constant, direction preserved). `points` is n x p.
// Throws RankDeficiencyError when the sampled vectors are dependent.
OrthonormalSet sample_on_points(const ReferenceBasis& basis, const Matrix& points);

// Points i/n, i = 1..n, as an n x 1 matrix: the time-changed scan grid.
Matrix uniform_grid(Index n);

}  // namespace dfreg

#endif  // DFREG_BASIS_HPP_
