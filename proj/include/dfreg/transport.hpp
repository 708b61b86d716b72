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

#ifndef DFREG_TRANSPORT_HPP_
#define DFREG_TRANSPORT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dfreg/rotations.hpp"

namespace dfreg {

enum class AnchorMode { kHalton, kRandom };

std::string to_string(AnchorMode mode);
AnchorMode anchor_mode_from_string(const std::string& name);

// n anchor points in [0,1]^p (rows of `points`).
struct AnchorSet {
  Matrix points;
  AnchorMode mode = AnchorMode::kHalton;
  std::uint64_t seed = 0;

  Index size() const { return points.rows(); }
  int dim() const { return static_cast<int>(points.cols()); }
};

// Van der Corput radical inverse of `index` in `base`.
double radical_inverse(std::uint64_t index, int base);

// kHalton: points 1..n of the Halton sequence in bases 2, 3, 5, ... (seed is
// ignored). kRandom: n i.i.d. uniform points from an engine seeded by `seed`.
AnchorSet generate_anchors(Index n, int p, AnchorMode mode, std::uint64_t seed = 0);

// Bijection T(X_i) = anchors[sigma[i]] with cost sum_i ‖X_i - anchors[sigma[i]]‖.
struct Assignment {
  std::vector<Index> sigma;
  Vector pair_costs;  // ‖X_i - anchors[sigma[i]]‖
  double cost = 0.0;  // correctly rounded sum of the pair distances
};

// Exact minimum-cost assignment under unsquared Euclidean cost, by the
// shortest-augmenting-path (Hungarian / Jonker-Volgenant style) algorithm with
// dual potentials, O(n^3). Deterministic for a fixed input.
Assignment solve_assignment(const Matrix& x, const Matrix& anchors);
inline Assignment solve_assignment(const Matrix& x, const AnchorSet& anchors) {
  return solve_assignment(x, anchors.points);
}

inline constexpr Index kMaxBruteForce = 8;

// Exhaustive minimum over all n! permutations; ties resolved towards the
// lexicographically smallest sigma. n <= kMaxBruteForce.
Assignment brute_force_assignment(const Matrix& x, const Matrix& anchors);

// Rows anchors[sigma[i]]: the transported covariates T_0(X_i).
Matrix transported_points(const Assignment& assignment, const Matrix& anchors);

// G_n(x) = (1/n) #{i : T_0(X_i) <= x componentwise}.
double transported_ecdf(const Assignment& assignment, const AnchorSet& anchors,
                        const Vector& x);

// Componentwise-<= empirical distribution function of the rows of `points`.
double empirical_cdf(const Matrix& points, const Vector& x);

// Per-coordinate affine map of the sample's bounding box onto [0,1]^p.
struct UnitCubeScaling {
  Vector lower;
  Vector upper;
  Matrix scaled;
};

// Throws DomainError when a coordinate is constant over the sample.
UnitCubeScaling rescale_to_unit_cube(const Matrix& x);

}  // namespace dfreg

#endif  // DFREG_TRANSPORT_HPP_
