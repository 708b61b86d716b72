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

#include "dfreg/transform.hpp"

#include <cmath>

#include "dfreg/error.hpp"

namespace dfreg {

TransformedResiduals transform_residuals(const Vector& eps_hat,
                                         const OrthonormalSet& mu_set,
                                         const OrthonormalSet& r_set,
                                         const TransformOptions& opts) {
  if (eps_hat.size() != mu_set.length()) {
    throw DimensionError("transform_residuals: residual length " +
                         std::to_string(eps_hat.size()) + " does not match n = " +
                         std::to_string(mu_set.length()));
  }
  RotationPlan plan = build_plan(mu_set, r_set).with_direction(Direction::kInverse);
  Vector e_hat = apply_plan(plan, eps_hat);
  double scale = 1.0;
  if (opts.studentize) {
    const double dof = static_cast<double>(eps_hat.size() - mu_set.count());
    if (dof <= 0.0) throw DomainError("transform_residuals: no degrees of freedom left");
    scale = std::sqrt(eps_hat.squaredNorm() / dof);
    if (scale > 0.0) e_hat /= scale;
  }
  return TransformedResiduals{std::move(e_hat), std::move(plan), mu_set, r_set, {}, scale,
                              true};
}

TransformedResiduals transform_residuals(const FitResult& fit,
                                         std::span<const Index> order,
                                         const OrthonormalSet& mu_set,
                                         const OrthonormalSet& r_set,
                                         const TransformOptions& opts) {
  if (static_cast<Index>(order.size()) != fit.residuals.size()) {
    throw DimensionError("transform_residuals: scan order has wrong length");
  }
  Vector ordered(fit.residuals.size());
  for (std::size_t j = 0; j < order.size(); ++j) ordered[j] = fit.residuals[order[j]];
  TransformedResiduals out = transform_residuals(ordered, mu_set, r_set, opts);
  out.scan_order.assign(order.begin(), order.end());
  out.reliable = fit.converged;
  return out;
}

Vector recover_residuals(const TransformedResiduals& t) {
  return apply_plan(t.plan.inverted(), t.e_hat * t.scale);
}

Matrix transform_matrix(const OrthonormalSet& mu_set, const OrthonormalSet& r_set) {
  const Index n = mu_set.length();
  if (n > kMaxDenseTransform) {
    throw DimensionError("transform_matrix: n = " + std::to_string(n) +
                         " exceeds the dense limit " + std::to_string(kMaxDenseTransform));
  }
  const RotationPlan plan = build_plan(mu_set, r_set).with_direction(Direction::kInverse);
  const Matrix mu = mu_set.as_matrix();
  const Matrix projector = Matrix::Identity(n, n) - mu * mu.transpose();
  Matrix a(n, n);
  for (Index j = 0; j < n; ++j) a.col(j) = apply_plan(plan, projector.col(j));
  return a;
}

}  // namespace dfreg
