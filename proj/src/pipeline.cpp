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

#include "dfreg/pipeline.hpp"

#include <algorithm>

#include "dfreg/error.hpp"

namespace dfreg {

Matrix rank_times(const Matrix& covariates, const std::vector<Index>& order) {
  const Index n = static_cast<Index>(order.size());
  Matrix t(n, 1);
  Index i = 0;
  while (i < n) {
    Index end = i + 1;
    while (end < n && covariates(order[end], 0) == covariates(order[i], 0)) ++end;
    const double value = static_cast<double>(end) / static_cast<double>(n);
    for (Index k = i; k < end; ++k) t(k, 0) = value;
    i = end;
  }
  return t;
}

Analysis analyze(const Sample& sample, const RegressionModel& model,
                 const ReferenceBasis& basis, const AnchorSet* anchors,
                 const AnalysisOptions& opts, const OrthonormalSet* grid_r_set) {
  if (basis.count() != model.dim()) {
    throw DimensionError("analyze: reference basis has " + std::to_string(basis.count()) +
                         " functions but the model has d = " +
                         std::to_string(model.dim()));
  }
  const Index n = sample.size();
  const int p = sample.dim();
  if (basis.dim() != p) {
    throw DimensionError("analyze: basis dimension " + std::to_string(basis.dim()) +
                         " does not match p = " + std::to_string(p));
  }
  const Vector theta0 =
      opts.theta0.size() == model.dim() ? opts.theta0 : Vector::Zero(model.dim());

  FitResult fitted = fit(model, sample, theta0, opts.gauss_newton);
  if (opts.exact_fit_tolerance > 0.0) {
    const double scale = std::max(1.0, sample.response.cwiseAbs().maxCoeff());
    if (fitted.residuals.cwiseAbs().maxCoeff() <= opts.exact_fit_tolerance * scale) {
      fitted.residuals.setZero();
    }
  }
  std::vector<Index> order = scan_order(sample);
  const OrthonormalSet mu = score_basis(model, fitted, sample, order);

  Vector raw(n);
  for (Index j = 0; j < n; ++j) raw[j] = fitted.residuals[order[j]];

  if (p == 1) {
    Matrix times = rank_times(sample.covariates, order);
    const OrthonormalSet r =
        grid_r_set && grid_r_set->length() == n && grid_r_set->count() == basis.count()
            ? *grid_r_set
            : sample_on_points(basis, uniform_grid(n));
    TransformedResiduals tr = transform_residuals(fitted, order, mu, r, opts.transform);
    StepProcess tp = build_process(tr.e_hat, times, opts.grid);
    StepProcess rp = build_process(raw, times, opts.grid);
    return Analysis{std::move(fitted), std::move(order), times, times, std::move(raw),
                    std::move(tr), std::nullopt, std::nullopt, std::move(tp), std::move(rp)};
  }

  if (anchors == nullptr) throw DomainError("analyze: anchors are required for p >= 2");
  if (anchors->size() != n || anchors->dim() != p) {
    throw DimensionError("analyze: anchor set does not match the sample");
  }
  UnitCubeScaling scaling = rescale_to_unit_cube(sample.covariates);
  Assignment assignment = solve_assignment(scaling.scaled, anchors->points);
  // scan order is the identity for p >= 2
  Matrix moved = transported_points(assignment, anchors->points);
  const OrthonormalSet r = sample_on_points(basis, moved);
  TransformedResiduals tr = transform_residuals(fitted, order, mu, r, opts.transform);
  StepProcess tp = build_process(tr.e_hat, moved, opts.grid);
  StepProcess rp = build_process(raw, scaling.scaled, opts.grid);
  Matrix raw_points = scaling.scaled;
  return Analysis{std::move(fitted), std::move(order), std::move(moved),
                  std::move(raw_points), std::move(raw), std::move(tr),
                  std::move(scaling), std::move(assignment), std::move(tp),
                  std::move(rp)};
}

}  // namespace dfreg
