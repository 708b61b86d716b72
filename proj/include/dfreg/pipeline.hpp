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

#ifndef DFREG_PIPELINE_HPP_
#define DFREG_PIPELINE_HPP_

#include <optional>
#include <vector>

#include "dfreg/basis.hpp"
#include "dfreg/model.hpp"
#include "dfreg/process.hpp"
#include "dfreg/transform.hpp"
#include "dfreg/transport.hpp"

namespace dfreg {

struct AnalysisOptions {
  GridSpec grid;
  TransformOptions transform;
  GaussNewtonOptions gauss_newton;
  Vector theta0;  // starting point for custom models; empty means zeros
  // Residuals with max |e_i| <= exact_fit_tolerance * max(1, max |Y_i|) are
  // replaced by exact zeros. 0 disables the check.
  double exact_fit_tolerance = 0.0;
};

// Everything computed for one sample.
//
// p = 1: observations are scanned in ascending covariate order; both
// processes live on the time-changed axis t = F_n(x), and the reference
// vectors are sampled on the grid i/n.
// p >= 2: covariates are rescaled to [0,1]^p and matched to the anchors; the
// transformed process is scanned at T_0(X_i), the raw one at the rescaled X_i.
struct Analysis {
  FitResult fit;
  std::vector<Index> order;
  Matrix scan_points;      // transformed process, in scan order
  Matrix raw_scan_points;  // raw process, in scan order
  Vector raw_residuals;    // eps_hat in scan order
  TransformedResiduals transformed;
  std::optional<UnitCubeScaling> scaling;
  std::optional<Assignment> assignment;
  StepProcess transformed_process;
  StepProcess raw_process;
};

// F_n(X_(i)) for the covariate sorted by `order` (ties share the larger value).
Matrix rank_times(const Matrix& covariates, const std::vector<Index>& order);

// Runs fit -> score basis -> reference basis -> rotation -> processes.
// `anchors` is required when p >= 2. `grid_r_set`, when given, is reused as
// the p = 1 reference set (it must equal sample_on_points(basis, i/n)).
// Throws DimensionError if the basis count differs from the model dimension.
Analysis analyze(const Sample& sample, const RegressionModel& model,
                 const ReferenceBasis& basis, const AnchorSet* anchors,
                 const AnalysisOptions& opts = {},
                 const OrthonormalSet* grid_r_set = nullptr);

}  // namespace dfreg

#endif  // DFREG_PIPELINE_HPP_
