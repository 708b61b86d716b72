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

#include "dfreg/rotations.hpp"

#include <cmath>
#include <string>

#include "dfreg/error.hpp"

namespace dfreg {
namespace {

void require_same_length(Index expected, Index actual, const char* what) {
  if (expected != actual) {
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(expected) + ", got " +
                         std::to_string(actual));
  }
}

}  // namespace

UnitVector::UnitVector(Vector coords) : coords_(std::move(coords)) {
  const double norm = coords_.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kUnitTolerance) {
    throw DomainError("UnitVector: norm " + std::to_string(norm) +
                      " is not 1");
  }
}

UnitVector UnitVector::normalized(const Vector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("UnitVector::normalized: zero or non-finite vector");
  }
  return UnitVector(v / norm, Trusted{});
}

OrthonormalSet OrthonormalSet::from_vectors(std::vector<Vector> vectors) {
  if (vectors.empty()) return OrthonormalSet(std::vector<UnitVector>{});
  const Index n = vectors.front().size();
  Matrix cols(n, static_cast<Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    require_same_length(n, vectors[k].size(), "OrthonormalSet");
    cols.col(static_cast<Index>(k)) = vectors[k];
  }
  if (cols.cols() > n) {
    throw DimensionError("OrthonormalSet: more vectors than dimensions");
  }
  const Matrix gram = cols.transpose() * cols;
  const double off =
      (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (!std::isfinite(off) || off > kOrthonormalInputTolerance) {
    throw DomainError("OrthonormalSet: Gram matrix deviates from identity by " +
                      std::to_string(off));
  }
  if (off > kReorthonormalizeThreshold) return gram_schmidt(vectors);
  std::vector<UnitVector> units;
  units.reserve(vectors.size());
  for (auto& v : vectors) units.push_back(UnitVector::normalized(v));
  return OrthonormalSet(std::move(units));
}

OrthonormalSet OrthonormalSet::from_columns(const Matrix& columns) {
  std::vector<Vector> vectors;
  vectors.reserve(static_cast<std::size_t>(columns.cols()));
  for (Index k = 0; k < columns.cols(); ++k) vectors.emplace_back(columns.col(k));
  return from_vectors(std::move(vectors));
}

Matrix OrthonormalSet::as_matrix() const {
  Matrix m(length(), count());
  for (int k = 0; k < count(); ++k) m.col(k) = vectors_[k].coords();
  return m;
}

OrthonormalSet OrthonormalSet::permuted(std::span<const Index> order) const {
  require_same_length(length(), static_cast<Index>(order.size()),
                      "OrthonormalSet::permuted");
  std::vector<UnitVector> out;
  out.reserve(vectors_.size());
  for (const auto& u : vectors_) {
    Vector v(u.size());
    for (std::size_t j = 0; j < order.size(); ++j) v[j] = u.coords()[order[j]];
    out.push_back(UnitVector::normalized(v));
  }
  return OrthonormalSet(std::move(out));
}

Vector reflect(const UnitVector& a, const UnitVector& b, const Vector& v) {
  require_same_length(a.size(), b.size(), "reflect");
  require_same_length(a.size(), v.size(), "reflect");
  const Vector diff = a.coords() - b.coords();
  // ‖a-b‖²/2 equals 1 - <a,b> for unit vectors, without the cancellation.
  const double denom = 0.5 * diff.squaredNorm();
  if (denom < kDegenerateReflection) return v;
  return v - (diff.dot(v) / denom) * diff;
}

std::vector<Vector> RotationPlan::rotated_targets() const {
  std::vector<Vector> out;
  out.reserve(pairs_.size());
  for (const auto& p : pairs_) out.push_back(p.target.coords());
  return out;
}

RotationPlan build_plan(const OrthonormalSet& source, const OrthonormalSet& target) {
  if (source.count() != target.count()) {
    throw DimensionError("build_plan: source has " +
                         std::to_string(source.count()) + " vectors, target " +
                         std::to_string(target.count()));
  }
  require_same_length(source.length(), target.length(), "build_plan");

  std::vector<ReflectionPair> pairs;
  pairs.reserve(static_cast<std::size_t>(source.count()));
  for (int k = 0; k < source.count(); ++k) {
    // r~_k = K_{k-1} r_k
    Vector rotated = target[k].coords();
    for (const auto& p : pairs) rotated = reflect(p.source, p.target, rotated);
    pairs.push_back({source[k], UnitVector::normalized(rotated)});
  }
  return RotationPlan(std::move(pairs), Direction::kForward);
}

Vector apply_plan(const RotationPlan& plan, const Vector& v) {
  if (plan.pairs().empty()) return v;
  require_same_length(plan.length(), v.size(), "apply_plan");
  Vector out = v;
  const auto& pairs = plan.pairs();
  if (plan.direction() == Direction::kForward) {
    for (const auto& p : pairs) out = reflect(p.source, p.target, out);
  } else {
    for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
      out = reflect(it->source, it->target, out);
    }
  }
  return out;
}

Matrix plan_matrix(const RotationPlan& plan) {
  const Index n = plan.length();
  Matrix k(n, n);
  for (Index i = 0; i < n; ++i) k.col(i) = apply_plan(plan, Vector::Unit(n, i));
  return k;
}

OrthonormalSet gram_schmidt(std::span<const Vector> vectors) {
  std::vector<UnitVector> out;
  if (vectors.empty()) return OrthonormalSet(std::move(out));
  const Index n = vectors.front().size();
  if (static_cast<Index>(vectors.size()) > n) {
    throw RankDeficiencyError("gram_schmidt: more vectors than dimensions",
                              static_cast<int>(n));
  }
  out.reserve(vectors.size());
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    require_same_length(n, vectors[k].size(), "gram_schmidt");
    const double input_norm = vectors[k].norm();
    Vector w = vectors[k];
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : out) w -= q.coords().dot(w) * q.coords();
    }
    const double pivot = w.norm();
    if (!std::isfinite(pivot) || !(pivot >= 1e-10 * input_norm) || pivot == 0.0) {
      throw RankDeficiencyError(
          "gram_schmidt: vector " + std::to_string(k) +
              " is linearly dependent on its predecessors",
          static_cast<int>(k));
    }
    out.push_back(UnitVector::normalized(w));
  }
  return OrthonormalSet(std::move(out));
}

Matrix inv_sqrt_spd(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("inv_sqrt_spd: matrix is not square");
  const double scale = m.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale)) throw DomainError("inv_sqrt_spd: non-finite entry");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
    throw DomainError("inv_sqrt_spd: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) {
    throw SingularityError("inv_sqrt_spd: eigendecomposition failed");
  }
  const Vector& lambda = eig.eigenvalues();
  const double max_eig = lambda.maxCoeff();
  if (!(max_eig > 0.0) || lambda.minCoeff() <= 1e-12 * max_eig) {
    throw SingularityError("inv_sqrt_spd: matrix is singular or indefinite");
  }
  const Matrix& v = eig.eigenvectors();
  return v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
}

}  // namespace dfreg
