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

#ifndef DFREG_ROTATIONS_HPP_
#define DFREG_ROTATIONS_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dfreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kUnitTolerance = 1e-10;
// Gram entries further than this from the identity reject an input set.
inline constexpr double kOrthonormalInputTolerance = 1e-8;
// Gram entries further than this (but inside the input tolerance) trigger
// internal re-orthonormalization.
inline constexpr double kReorthonormalizeThreshold = 1e-12;
// 1 - <a,b> below this is treated as a == b.
inline constexpr double kDegenerateReflection = 1e-12;

// A vector of Euclidean norm one (within kUnitTolerance).
class UnitVector {
 public:
  // Throws DomainError when |‖coords‖ - 1| > kUnitTolerance.
  explicit UnitVector(Vector coords);

  // Scales `v` to unit length; throws DomainError for the zero vector.
  static UnitVector normalized(const Vector& v);

  const Vector& coords() const { return coords_; }
  Index size() const { return coords_.size(); }

 private:
  struct Trusted {};
  UnitVector(Vector coords, Trusted) : coords_(std::move(coords)) {}

  Vector coords_;
};

// k mutually orthogonal unit vectors of common length n (k <= n).
class OrthonormalSet {
 public:
  // Validates the Gram matrix: entries off the identity by more than
  // kOrthonormalInputTolerance are rejected (DomainError), entries off by
  // more than kReorthonormalizeThreshold are repaired by Gram-Schmidt.
  static OrthonormalSet from_vectors(std::vector<Vector> vectors);
  // Columns of `columns` are the vectors.
  static OrthonormalSet from_columns(const Matrix& columns);

  int count() const { return static_cast<int>(vectors_.size()); }
  Index length() const { return vectors_.empty() ? 0 : vectors_.front().size(); }
  const UnitVector& operator[](int k) const { return vectors_[k]; }
  const std::vector<UnitVector>& vectors() const { return vectors_; }

  // n x k matrix with the vectors as columns.
  Matrix as_matrix() const;

  // Same vectors with entries permuted: result[j] = this[order[j]].
  OrthonormalSet permuted(std::span<const Index> order) const;

 private:
  friend OrthonormalSet gram_schmidt(std::span<const Vector> vectors);
  explicit OrthonormalSet(std::vector<UnitVector> vectors)
      : vectors_(std::move(vectors)) {}

  std::vector<UnitVector> vectors_;
};

// Elementary unitary operator U_{a,b}:
//   U v = v - <a-b, v> / (1 - <a,b>) (a-b),
// swapping a and b and fixing their orthogonal complement. Identity when
// 1 - <a,b> < kDegenerateReflection.
Vector reflect(const UnitVector& a, const UnitVector& b, const Vector& v);

enum class Direction { kForward, kInverse };

// One factor U_{source, target} of a RotationPlan.
struct ReflectionPair {
  UnitVector source;  // mu_k
  UnitVector target;  // r~_k, the image of r_k under the preceding factors
};

// Composition K_d = U_{mu_d, r~_d} ... U_{mu_1, r_1} stored as its factors.
//
// kForward applies the factors first-to-last and maps r_k -> mu_k.
// kInverse applies them last-to-first, which is K_d^{-1} because each factor
// is a symmetric involution, and maps mu_k -> r_k.
class RotationPlan {
 public:
  RotationPlan(std::vector<ReflectionPair> pairs, Direction direction)
      : pairs_(std::move(pairs)), direction_(direction) {}

  const std::vector<ReflectionPair>& pairs() const { return pairs_; }
  Direction direction() const { return direction_; }
  Index length() const { return pairs_.empty() ? 0 : pairs_.front().source.size(); }

  RotationPlan with_direction(Direction direction) const {
    return RotationPlan(pairs_, direction);
  }
  RotationPlan inverted() const {
    return with_direction(direction_ == Direction::kForward ? Direction::kInverse
                                                            : Direction::kForward);
  }

  // The cached r~_k, k = 1..d.
  std::vector<Vector> rotated_targets() const;

 private:
  std::vector<ReflectionPair> pairs_;
  Direction direction_;
};

// Builds the factors of K_d mapping target_k -> source_k (forward direction).
// Throws DimensionError on mismatched counts or lengths.
RotationPlan build_plan(const OrthonormalSet& source, const OrthonormalSet& target);

Vector apply_plan(const RotationPlan& plan, const Vector& v);

// Dense n x n matrix of the plan in its direction. Test and diagnostic use.
Matrix plan_matrix(const RotationPlan& plan);

// Ordered orthonormalization (classical Gram-Schmidt with one
// re-orthogonalization pass). Keeps the span of every prefix and the direction
// of the first vector. Throws RankDeficiencyError when a pivot falls below
// 1e-10 times the norm of the vector it came from.
OrthonormalSet gram_schmidt(std::span<const Vector> vectors);

// Symmetric N with N M N = I for symmetric positive definite M, via the
// symmetric eigendecomposition. Throws DomainError for a non-symmetric input
// and SingularityError when min eigenvalue <= 1e-12 * max eigenvalue.
Matrix inv_sqrt_spd(const Matrix& m);

}  // namespace dfreg

#endif  // DFREG_ROTATIONS_HPP_
