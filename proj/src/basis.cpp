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

#include "dfreg/basis.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "dfreg/error.hpp"

namespace dfreg {
namespace {

// P_0..P_{max_degree}(x) by the three-term recurrence.
std::array<double, kMaxLegendreDegree + 2> legendre_values(double x, int max_degree) {
  std::array<double, kMaxLegendreDegree + 2> p{};
  p[0] = 1.0;
  if (max_degree >= 1) p[1] = x;
  for (int n = 1; n < max_degree; ++n) {
    p[n + 1] = ((2.0 * n + 1.0) * x * p[n] - n * p[n - 1]) / (n + 1.0);
  }
  return p;
}

void check_degree(int degree) {
  if (degree < 0 || degree > kMaxLegendreDegree) {
    throw DomainError("legendre_shifted: degree " + std::to_string(degree) +
                      " outside [0, " + std::to_string(kMaxLegendreDegree) + "]");
  }
}

void check_unit(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("legendre_shifted: t = " + std::to_string(t) +
                      " outside [0, 1]");
  }
}

}  // namespace

double legendre_shifted(int degree, double t) {
  check_degree(degree);
  check_unit(t);
  const auto p = legendre_values(2.0 * t - 1.0, degree);
  return std::sqrt(2.0 * degree + 1.0) * p[degree];
}

double legendre_shifted_integral(int degree, double t) {
  check_degree(degree);
  check_unit(t);
  if (degree == 0) return t;
  // integral_{-1}^{x} P_n = (P_{n+1}(x) - P_{n-1}(x)) / (2n + 1), dt = dx / 2.
  const auto p = legendre_values(2.0 * t - 1.0, degree + 1);
  const double c = std::sqrt(2.0 * degree + 1.0);
  return c * 0.5 * (p[degree + 1] - p[degree - 1]) / (2.0 * degree + 1.0);
}

double ReferenceBasis::value(int k, const Vector& x) const {
  if (x.size() != p_) throw DimensionError("ReferenceBasis::value: wrong point dimension");
  double out = 1.0;
  for (int j = 0; j < p_; ++j) out *= legendre_shifted(degrees_[k][j], x[j]);
  return out;
}

double ReferenceBasis::cumulative(int k, const Vector& x) const {
  if (x.size() != p_) {
    throw DimensionError("ReferenceBasis::cumulative: wrong point dimension");
  }
  double out = 1.0;
  for (int j = 0; j < p_; ++j) out *= legendre_shifted_integral(degrees_[k][j], x[j]);
  return out;
}

std::string ReferenceBasis::describe() const {
  std::ostringstream os;
  os << "legendre(p=" << p_ << ",d=" << count() << "):";
  for (const auto& deg : degrees_) {
    os << '(';
    for (int j = 0; j < p_; ++j) os << (j ? "," : "") << deg[j];
    os << ')';
  }
  return os.str();
}

ReferenceBasis make_basis(int p, int d) {
  if (p < 1) throw DomainError("make_basis: p must be >= 1");
  if (d < 1) throw DomainError("make_basis: d must be >= 1");
  const double available = std::pow(kMaxLegendreDegree + 1.0, p);
  if (d > available) {
    throw DomainError("make_basis: d = " + std::to_string(d) +
                      " exceeds the degree cap for p = " + std::to_string(p));
  }
  std::vector<std::vector<int>> degrees;
  degrees.reserve(static_cast<std::size_t>(d));
  std::vector<int> current(static_cast<std::size_t>(p), 0);
  // Enumerate compositions of `total` into p parts in decreasing lex order.
  auto emit = [&](auto&& self, int pos, int remaining) -> void {
    if (static_cast<int>(degrees.size()) >= d) return;
    if (pos == p - 1) {
      if (remaining <= kMaxLegendreDegree) {
        current[pos] = remaining;
        degrees.push_back(current);
      }
      return;
    }
    for (int v = std::min(remaining, kMaxLegendreDegree); v >= 0; --v) {
      current[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  for (int total = 0; static_cast<int>(degrees.size()) < d; ++total) {
    emit(emit, 0, total);
  }
  return ReferenceBasis(p, std::move(degrees));
}

OrthonormalSet sample_on_points(const ReferenceBasis& basis, const Matrix& points) {
  if (points.cols() != basis.dim()) {
    throw DimensionError("sample_on_points: points have " +
                         std::to_string(points.cols()) + " columns, basis has p = " +
                         std::to_string(basis.dim()));
  }
  const Index n = points.rows();
  if (n < basis.count()) {
    throw RankDeficiencyError("sample_on_points: need n >= d points", 0);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<Vector> vectors(static_cast<std::size_t>(basis.count()), Vector(n));
  for (Index i = 0; i < n; ++i) {
    const Vector x = points.row(i).transpose();
    for (int k = 0; k < basis.count(); ++k) vectors[k][i] = basis.value(k, x) * scale;
  }
  return gram_schmidt(vectors);
}

Matrix uniform_grid(Index n) {
  Matrix t(n, 1);
  for (Index i = 0; i < n; ++i) t(i, 0) = static_cast<double>(i + 1) / static_cast<double>(n);
  return t;
}

}  // namespace dfreg
