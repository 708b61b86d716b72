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

#include "dfreg/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "dfreg/error.hpp"
#include "dfreg/rng.hpp"

namespace dfreg {
namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                           41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

void check_pair(const Matrix& x, const Matrix& anchors, const char* who) {
  if (x.rows() != anchors.rows() || x.cols() != anchors.cols()) {
    throw DimensionError(std::string(who) + ": covariates are " +
                         std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                         ", anchors " + std::to_string(anchors.rows()) + "x" +
                         std::to_string(anchors.cols()));
  }
  if (!x.allFinite() || !anchors.allFinite()) {
    throw DomainError(std::string(who) + ": non-finite coordinates");
  }
}

Matrix cost_matrix(const Matrix& x, const Matrix& anchors) {
  const Index n = x.rows();
  Matrix c(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) c(i, j) = (x.row(i) - anchors.row(j)).norm();
  }
  return c;
}

// Correctly rounded sum of `terms` (Shewchuk partials, round-half-even fix-up).
double exact_sum(const std::vector<double>& terms) {
  std::vector<double> partials;
  for (double x : terms) {
    std::size_t k = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[k++] = lo;
      x = hi;
    }
    partials.resize(k);
    partials.push_back(x);
  }
  if (partials.empty()) return 0.0;
  std::size_t k = partials.size() - 1;
  double hi = partials[k];
  double lo = 0.0;
  while (k > 0) {
    const double x = hi;
    const double y = partials[--k];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (k > 0 && ((lo < 0.0 && partials[k - 1] < 0.0) || (lo > 0.0 && partials[k - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

// Total cost of sigma. For p = 1 the sum is formed from the signed
// coordinates, so equal-cost matchings report bit-identical totals.
double total_cost(const Matrix& x, const Matrix& anchors, const Matrix& c,
                  const std::vector<Index>& sigma) {
  std::vector<double> terms;
  const Index n = static_cast<Index>(sigma.size());
  if (x.cols() == 1) {
    terms.reserve(static_cast<std::size_t>(2 * n));
    for (Index i = 0; i < n; ++i) {
      const double a = x(i, 0);
      const double b = anchors(sigma[i], 0);
      terms.push_back(a >= b ? a : -a);
      terms.push_back(a >= b ? -b : b);
    }
  } else {
    terms.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) terms.push_back(c(i, sigma[i]));
  }
  return exact_sum(terms);
}

Assignment finish(const Matrix& x, const Matrix& anchors, const Matrix& c,
                  std::vector<Index> sigma) {
  Assignment out;
  out.pair_costs.resize(static_cast<Index>(sigma.size()));
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    out.pair_costs[static_cast<Index>(i)] = c(static_cast<Index>(i), sigma[i]);
  }
  out.cost = total_cost(x, anchors, c, sigma);
  out.sigma = std::move(sigma);
  return out;
}

}  // namespace

std::string to_string(AnchorMode mode) {
  return mode == AnchorMode::kHalton ? "halton" : "random";
}

AnchorMode anchor_mode_from_string(const std::string& name) {
  if (name == "halton") return AnchorMode::kHalton;
  if (name == "random") return AnchorMode::kRandom;
  throw DomainError("unknown anchor mode '" + name + "' (expected halton|random)");
}

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

AnchorSet generate_anchors(Index n, int p, AnchorMode mode, std::uint64_t seed) {
  if (n < 1) throw DomainError("generate_anchors: n must be >= 1");
  if (p < 1) throw DomainError("generate_anchors: p must be >= 1");
  AnchorSet out{Matrix(n, p), mode, seed};
  if (mode == AnchorMode::kHalton) {
    if (p > static_cast<int>(std::size(kPrimes))) {
      throw DomainError("generate_anchors: Halton supports p <= " +
                        std::to_string(std::size(kPrimes)));
    }
    for (Index i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) {
        out.points(i, j) = radical_inverse(static_cast<std::uint64_t>(i + 1), kPrimes[j]);
      }
    }
  } else {
    Engine engine = make_engine(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Index i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) out.points(i, j) = unif(engine);
    }
  }
  return out;
}

Assignment solve_assignment(const Matrix& x, const Matrix& anchors) {
  check_pair(x, anchors, "solve_assignment");
  const Index n = x.rows();
  const Matrix c = cost_matrix(x, anchors);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // One-based arrays; column 0 is the virtual source of each augmentation.
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Index> row_of(static_cast<std::size_t>(n + 1), 0);
  std::vector<Index> way(static_cast<std::size_t>(n + 1), 0);
  std::vector<double> min_slack(static_cast<std::size_t>(n + 1));
  std::vector<char> used(static_cast<std::size_t>(n + 1));

  for (Index i = 1; i <= n; ++i) {
    row_of[0] = i;
    Index col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const Index row0 = row_of[col0];
      double delta = kInf;
      Index col1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double slack = c(row0 - 1, j - 1) - u[row0] - v[j];
        if (slack < min_slack[j]) {
          min_slack[j] = slack;
          way[j] = col0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          col1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      col0 = col1;
    } while (row_of[col0] != 0);
    do {
      const Index col1 = way[col0];
      row_of[col0] = row_of[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<Index> sigma(static_cast<std::size_t>(n));
  for (Index j = 1; j <= n; ++j) sigma[row_of[j] - 1] = j - 1;
  return finish(x, anchors, c, std::move(sigma));
}

Assignment brute_force_assignment(const Matrix& x, const Matrix& anchors) {
  check_pair(x, anchors, "brute_force_assignment");
  const Index n = x.rows();
  if (n > kMaxBruteForce) {
    throw DomainError("brute_force_assignment: n = " + std::to_string(n) +
                      " exceeds " + std::to_string(kMaxBruteForce));
  }
  const Matrix c = cost_matrix(x, anchors);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::vector<Index> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    const double cost = total_cost(x, anchors, c, perm);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return finish(x, anchors, c, std::move(best));
}

Matrix transported_points(const Assignment& assignment, const Matrix& anchors) {
  const Index n = static_cast<Index>(assignment.sigma.size());
  if (anchors.rows() != n) throw DimensionError("transported_points: size mismatch");
  Matrix out(n, anchors.cols());
  for (Index i = 0; i < n; ++i) out.row(i) = anchors.row(assignment.sigma[i]);
  return out;
}

double empirical_cdf(const Matrix& points, const Vector& x) {
  if (points.cols() != x.size()) throw DimensionError("empirical_cdf: dimension mismatch");
  if (points.rows() == 0) return 0.0;
  Index count = 0;
  for (Index i = 0; i < points.rows(); ++i) {
    if ((points.row(i).transpose().array() <= x.array()).all()) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(points.rows());
}

double transported_ecdf(const Assignment& assignment, const AnchorSet& anchors,
                        const Vector& x) {
  return empirical_cdf(transported_points(assignment, anchors.points), x);
}

UnitCubeScaling rescale_to_unit_cube(const Matrix& x) {
  UnitCubeScaling out{x.colwise().minCoeff().transpose(),
                      x.colwise().maxCoeff().transpose(), Matrix(x.rows(), x.cols())};
  for (Index j = 0; j < x.cols(); ++j) {
    const double width = out.upper[j] - out.lower[j];
    if (!(width > 0.0)) {
      throw DomainError("rescale_to_unit_cube: covariate " + std::to_string(j) +
                        " is constant");
    }
    out.scaled.col(j) = ((x.col(j).array() - out.lower[j]) / width).min(1.0).max(0.0);
  }
  return out;
}

}  // namespace dfreg
