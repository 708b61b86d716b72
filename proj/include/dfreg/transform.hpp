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

#ifndef DFREG_TRANSFORM_HPP_
#define DFREG_TRANSFORM_HPP_

#include <span>
#include <vector>

#include "dfreg/model.hpp"
#include "dfreg/rotations.hpp"

namespace dfreg {

struct TransformOptions {
  // Divide e_hat by sqrt(sum eps_hat^2 / (n - d)). Off by default: the
  // construction assumes unit error variance.
  bool studentize = false;
};

// Distribution-free residuals e_hat = K^{-1} eps_hat together with everything
// needed to reproduce or invert them.
struct TransformedResiduals {
  Vector e_hat;
  RotationPlan plan;  // kInverse: maps mu_k -> r_k
  OrthonormalSet mu_set;
  OrthonormalSet r_set;
  std::vector<Index> scan_order;  // empty when the caller passed raw vectors
  double scale = 1.0;             // studentizing divisor (1 when off)
  bool reliable = true;           // false when the underlying fit did not converge
};

// Rotates eps_hat (already in scan order) by the unitary map sending every
// mu_k to r_k and fixing the complement of their span. With d = 1 and eps_hat
// orthogonal to mu_1 this is
//   e_hat = eps_hat - <eps_hat, r> / (1 - <mu, r>) (r - mu).
TransformedResiduals transform_residuals(const Vector& eps_hat,
                                         const OrthonormalSet& mu_set,
                                         const OrthonormalSet& r_set,
                                         const TransformOptions& opts = {});

// Convenience overload: reorders fit.residuals by `order` and tags the result
// unreliable when the fit did not converge.
TransformedResiduals transform_residuals(const FitResult& fit,
                                         std::span<const Index> order,
                                         const OrthonormalSet& mu_set,
                                         const OrthonormalSet& r_set,
                                         const TransformOptions& opts = {});

// Applies the opposite direction of the plan: recovers eps_hat from e_hat.
Vector recover_residuals(const TransformedResiduals& t);

inline constexpr Index kMaxDenseTransform = 2000;

// A = K^{-1} (I - sum mu_k mu_k^T), the exact linear map eps -> e_hat for
// linear models, materialized densely. n <= kMaxDenseTransform.
Matrix transform_matrix(const OrthonormalSet& mu_set, const OrthonormalSet& r_set);

}  // namespace dfreg

#endif  // DFREG_TRANSFORM_HPP_
