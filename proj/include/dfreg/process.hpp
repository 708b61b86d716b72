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

#ifndef DFREG_PROCESS_HPP_
#define DFREG_PROCESS_HPP_

#include <string>
#include <vector>

#include "dfreg/basis.hpp"
#include "dfreg/rotations.hpp"

namespace dfreg {

// Regular evaluation grid used in dimension p >= 2 to approximate the
// supremum over x. resolution <= 0 selects default_grid_resolution(p).
struct GridSpec {
  int resolution = 0;
};

// 64 for p = 2, 16 for p = 3, 8 beyond.
int default_grid_resolution(int p);

// Partial-sum process x -> sum_i c_i 1{scan_i <= x} (componentwise <=), with
// c_i = residual_i / sqrt(n), tabulated on its evaluation set:
//   p = 1: every distinct scan point (the right-continuous jump points);
//   p >= 2: every scan point plus the grid {1/m, ..., 1}^p.
class StepProcess {
 public:
  StepProcess(Matrix scan_points, Vector contributions, Matrix eval_points,
              Vector values, int grid_resolution)
      : scan_points_(std::move(scan_points)),
        contributions_(std::move(contributions)),
        eval_points_(std::move(eval_points)),
        values_(std::move(values)),
        grid_resolution_(grid_resolution) {}

  int dim() const { return static_cast<int>(scan_points_.cols()); }
  const Matrix& scan_points() const { return scan_points_; }
  const Vector& contributions() const { return contributions_; }
  const Matrix& eval_points() const { return eval_points_; }
  const Vector& values() const { return values_; }
  int grid_resolution() const { return grid_resolution_; }

  double value_at(const Vector& x) const;

 private:
  Matrix scan_points_;
  Vector contributions_;
  Matrix eval_points_;
  Vector values_;
  int grid_resolution_;
};

// Throws DimensionError on length mismatch, DomainError for p >= 2 scan
// points outside [0,1]^p.
StepProcess build_process(const Vector& residuals, const Matrix& scan_points,
                          const GridSpec& grid = {});

enum class StatisticKind { kKsAbs, kKsPlus, kCvm };

std::string to_string(StatisticKind kind);
StatisticKind statistic_from_string(const std::string& name);

struct StatisticResult {
  StatisticKind name;
  double value = 0.0;
  // Evaluation point attaining the value; empty when the supremum is the
  // zero level left of every scan point (ks_plus of a negative path).
  std::vector<double> argmax;
};

// ks_abs = sup |w|, ks_plus = sup w (including the initial zero level),
// cvm = mean of w^2 over the evaluation set (a discrete Cramer-von Mises
// surrogate, not part of the original construction). Order: abs, plus, cvm.
std::vector<StatisticResult> ks_statistics(const StepProcess& process);
StatisticResult compute_statistic(const StepProcess& process, StatisticKind kind);

// Kolmogorov distribution K(x) = 1 - 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
// For x < 1 the equivalent theta-function form
// sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2)) is summed instead (it
// converges fast there). Throws DomainError for negative x.
double kolmogorov_cdf(double x);

// Covariance of the limiting projected Brownian motion on [0,1]^p:
// prod_j min(x_j, y_j) - sum_k Q_k(x) Q_k(y).
double limit_covariance(const Vector& x, const Vector& y, const ReferenceBasis& basis);

}  // namespace dfreg

#endif  // DFREG_PROCESS_HPP_
