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

#include "dfreg/process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dfreg/error.hpp"

namespace dfreg {
namespace {

void check_unit_cube(const Matrix& points, const char* who) {
  if ((points.array() < 0.0).any() || (points.array() > 1.0).any() ||
      !points.allFinite()) {
    throw DomainError(std::string(who) + ": points must lie in [0,1]^p");
  }
}

double sum_below(const Matrix& scan, const Vector& contrib, const Vector& x) {
  double s = 0.0;
  const Index p = scan.cols();
  for (Index i = 0; i < scan.rows(); ++i) {
    bool below = true;
    for (Index j = 0; j < p && below; ++j) below = scan(i, j) <= x[j];
    if (below) s += contrib[i];
  }
  return s;
}

std::vector<double> row_vector(const Matrix& m, Index i) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Index j = 0; j < m.cols(); ++j) out[j] = m(i, j);
  return out;
}

}  // namespace

int default_grid_resolution(int p) {
  if (p <= 2) return 64;
  if (p == 3) return 16;
  return 8;
}

double StepProcess::value_at(const Vector& x) const {
  if (x.size() != scan_points_.cols()) {
    throw DimensionError("StepProcess::value_at: dimension mismatch");
  }
  return sum_below(scan_points_, contributions_, x);
}

StepProcess build_process(const Vector& residuals, const Matrix& scan_points,
                          const GridSpec& grid) {
  const Index n = residuals.size();
  if (scan_points.rows() != n) {
    throw DimensionError("build_process: " + std::to_string(n) + " residuals but " +
                         std::to_string(scan_points.rows()) + " scan points");
  }
  if (scan_points.cols() < 1) throw DimensionError("build_process: p must be >= 1");
  const int p = static_cast<int>(scan_points.cols());
  const Vector contrib = residuals / std::sqrt(static_cast<double>(std::max<Index>(n, 1)));

  if (p == 1) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return scan_points(a, 0) < scan_points(b, 0);
    });
    std::vector<double> points;
    std::vector<double> values;
    double running = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      running += contrib[order[k]];
      const double t = scan_points(order[k], 0);
      // Tied scan points jump together: record the value after the last one.
      if (k + 1 == order.size() || scan_points(order[k + 1], 0) != t) {
        points.push_back(t);
        values.push_back(running);
      }
    }
    const Index e = static_cast<Index>(points.size());
    return StepProcess(scan_points, contrib, Eigen::Map<Matrix>(points.data(), e, 1),
                       Eigen::Map<Vector>(values.data(), e), 0);
  }

  check_unit_cube(scan_points, "build_process");
  const int m = grid.resolution > 0 ? grid.resolution : default_grid_resolution(p);
  Index grid_size = 1;
  for (int j = 0; j < p; ++j) grid_size *= m;
  Matrix eval(n + grid_size, p);
  eval.topRows(n) = scan_points;
  for (Index g = 0; g < grid_size; ++g) {
    Index rest = g;
    for (int j = 0; j < p; ++j) {
      eval(n + g, j) = static_cast<double>(rest % m + 1) / m;
      rest /= m;
    }
  }
  Vector values(eval.rows());
  for (Index e = 0; e < eval.rows(); ++e) {
    values[e] = sum_below(scan_points, contrib, eval.row(e).transpose());
  }
  return StepProcess(scan_points, contrib, std::move(eval), std::move(values), m);
}

std::string to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::kKsAbs:
      return "ks_abs";
    case StatisticKind::kKsPlus:
      return "ks_plus";
    case StatisticKind::kCvm:
      return "cvm";
  }
  return "unknown";
}

StatisticKind statistic_from_string(const std::string& name) {
  if (name == "ks_abs") return StatisticKind::kKsAbs;
  if (name == "ks_plus") return StatisticKind::kKsPlus;
  if (name == "cvm") return StatisticKind::kCvm;
  throw DomainError("unknown statistic '" + name + "' (expected ks_abs|ks_plus|cvm)");
}

StatisticResult compute_statistic(const StepProcess& process, StatisticKind kind) {
  const Vector& v = process.values();
  const Matrix& pts = process.eval_points();
  StatisticResult out{kind, 0.0, {}};
  if (v.size() == 0) return out;
  Index at = 0;
  switch (kind) {
    case StatisticKind::kKsAbs:
      out.value = v.cwiseAbs().maxCoeff(&at);
      out.argmax = row_vector(pts, at);
      break;
    case StatisticKind::kKsPlus: {
      const double top = v.maxCoeff(&at);
      if (top > 0.0) {
        out.value = top;
        out.argmax = row_vector(pts, at);
      }
      break;
    }
    case StatisticKind::kCvm:
      out.value = v.squaredNorm() / static_cast<double>(v.size());
      v.cwiseAbs().maxCoeff(&at);
      out.argmax = row_vector(pts, at);
      break;
  }
  return out;
}

std::vector<StatisticResult> ks_statistics(const StepProcess& process) {
  if (process.values().size() == 0) {
    throw DomainError("ks_statistics: empty evaluation set");
  }
  return {compute_statistic(process, StatisticKind::kKsAbs),
          compute_statistic(process, StatisticKind::kKsPlus),
          compute_statistic(process, StatisticKind::kCvm)};
}

double kolmogorov_cdf(double x) {
  if (std::isnan(x) || x < 0.0) throw DomainError("kolmogorov_cdf: x must be >= 0");
  if (x == 0.0) return 0.0;
  constexpr double kTol = 1e-12;
  if (x < 1.0) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k < 1000; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi2 / (8.0 * x * x));
      sum += term;
      if (term < kTol * std::max(sum, 1e-300)) break;
    }
    return std::min(1.0, std::sqrt(2.0 * std::numbers::pi) / x * sum);
  }
  double sum = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < kTol) break;
  }
  return std::clamp(1.0 - 2.0 * sum, 0.0, 1.0);
}

double limit_covariance(const Vector& x, const Vector& y, const ReferenceBasis& basis) {
  if (x.size() != basis.dim() || y.size() != basis.dim()) {
    throw DimensionError("limit_covariance: point dimension does not match basis");
  }
  const auto in_unit = [](const Vector& v) {
    return v.allFinite() && (v.array() >= 0.0).all() && (v.array() <= 1.0).all();
  };
  if (!in_unit(x) || !in_unit(y)) {
    throw DomainError("limit_covariance: points must lie in [0,1]^p");
  }
  double cov = x.cwiseMin(y).prod();
  for (int k = 0; k < basis.count(); ++k) cov -= basis.cumulative(k, x) * basis.cumulative(k, y);
  return cov;
}

}  // namespace dfreg
