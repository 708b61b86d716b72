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

#include "dfreg/model.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dfreg/error.hpp"
#include "dfreg/harness.hpp"
#include "oracles.hpp"

namespace dfreg {
namespace {

Matrix column(std::initializer_list<double> xs) {
  Matrix m(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

Vector vec(std::initializer_list<double> xs) { return column(xs).col(0); }

Matrix uniform_matrix(Index n, Index p, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix x(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) x(i, j) = u(rng);
  return x;
}

Vector normal_vector(Index n, std::mt19937_64& rng) {
  return oracle::gaussian_matrix(static_cast<int>(n), 1, rng).col(0);
}

std::vector<Index> identity_order(Index n) {
  std::vector<Index> o(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) o[static_cast<std::size_t>(i)] = i;
  return o;
}

TEST(Sample, ValidatesShapeAndValues) {
  EXPECT_THROW(make_sample(column({1, 2, 3}), vec({1, 2})), DimensionError);
  EXPECT_THROW(make_sample(column({1}), vec({1})), DimensionError);
  EXPECT_THROW(make_sample(column({1, NAN, 3}), vec({1, 2, 3})), DomainError);
  EXPECT_THROW(make_sample(column({1, 2, 3}), vec({1, INFINITY, 3})), DomainError);
  EXPECT_EQ(make_sample(column({1, 2, 3}), vec({1, 2, 3})).size(), 3);
}

TEST(FitLinear, NoiselessSimpleLinear) {
  const Sample s = make_sample(column({0.5, 1.0, 1.5, 2.0}), vec({1.0, 2.0, 3.0, 4.0}));
  const FitResult f = fit_linear(RegressionModel::simple_linear(), s);
  EXPECT_NEAR(f.theta_hat[0], 2.0, 1e-14);
  EXPECT_LT(f.residuals.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_TRUE(f.converged);
}

TEST(FitLinear, ConstantResponseCenteredLinear) {
  const Sample s = make_sample(column({0.3, 1.7, 2.2}), vec({3.0, 3.0, 3.0}));
  const FitResult f = fit_linear(RegressionModel::centered_linear(), s);
  EXPECT_NEAR(f.theta_hat[0], 3.0, 1e-14);
  EXPECT_NEAR(f.theta_hat[1], 0.0, 1e-14);
}

TEST(FitLinear, HandComputedSlope) {
  const Sample s = make_sample(column({1, 2, 3}), vec({1, 2, 4}));
  const FitResult f = fit_linear(RegressionModel::simple_linear(), s);
  EXPECT_NEAR(f.theta_hat[0], 17.0 / 14.0, 1e-15);
  EXPECT_NEAR(f.info_matrix(0, 0), 14.0 / 3.0, 1e-14);
}

TEST(FitLinear, RejectsRankDeficientDesignAndCustomModels) {
  const auto dup = RegressionModel::basis_linear(
      {[](const Vector& x) { return x[0]; }, [](const Vector& x) { return 2.0 * x[0]; }});
  const Sample s = make_sample(column({1, 2, 3, 4}), vec({1, 2, 3, 5}));
  EXPECT_THROW(fit_linear(dup, s), SingularityError);
  const auto custom = RegressionModel::custom(
      1, [](const Vector& t, const Vector& x) { return t[0] * x[0]; },
      [](const Vector&, const Vector& x) { return Vector::Constant(1, x[0]); });
  EXPECT_THROW(fit_linear(custom, s), DomainError);
}

TEST(FitLinear, NormalEquationsAndOrthogonality) {
  std::mt19937_64 rng(21);
  for (const std::string id : {"simple_linear", "centered_linear", "quadratic", "bilinear2d"}) {
    const RegressionModel m = make_model(id);
    const Index p = m.covariate_dim().value_or(1);
    const Matrix x = uniform_matrix(200, p, rng);
    const Vector y = m.mean(Vector::Ones(m.dim()), x) + normal_vector(200, rng);
    const Sample s = make_sample(x, y);
    const FitResult f = fit_linear(m, s);
    const Matrix j = m.jacobian(f.theta_hat, x);
    EXPECT_LT((j.transpose() * f.residuals).cwiseAbs().maxCoeff(), 1e-6 * std::sqrt(200.0)) << id;
    for (Index k = 0; k < j.cols(); ++k) {
      EXPECT_LT(std::abs(j.col(k).normalized().dot(f.residuals)), 1e-8 * y.norm()) << id;
    }
    EXPECT_LT((f.info_matrix - j.transpose() * j / 200.0).cwiseAbs().maxCoeff(), 1e-12) << id;
  }
}

TEST(FitLinear, ResidualsAreProjectionOfErrors) {
  std::mt19937_64 rng(22);
  for (const std::string id : {"simple_linear", "centered_linear", "bilinear2d"}) {
    const RegressionModel m = make_model(id);
    const Index p = m.covariate_dim().value_or(1);
    const Matrix x = uniform_matrix(120, p, rng, 0.0, 2.0);
    const Vector eps = normal_vector(120, rng);
    const Sample s = make_sample(x, m.mean(Vector::Constant(m.dim(), 1.5), x) + eps);
    const FitResult f = fit_linear(m, s);
    const OrthonormalSet mu = score_basis(m, f, s, identity_order(120));
    Vector expected = eps;
    for (int k = 0; k < mu.count(); ++k) {
      expected -= mu[k].coords() * mu[k].coords().dot(eps);
    }
    EXPECT_LT((f.residuals - expected).cwiseAbs().maxCoeff(), 1e-8) << id;
  }
}

TEST(FitLinear, RefitOnFittedPlusResidualsIsIdempotent) {
  std::mt19937_64 rng(23);
  const RegressionModel m = RegressionModel::bilinear2d();
  const Matrix x = uniform_matrix(80, 2, rng);
  const Sample s = make_sample(x, m.mean(Vector::Ones(4), x) + normal_vector(80, rng));
  const FitResult f = fit_linear(m, s);
  const Sample again = make_sample(x, m.mean(f.theta_hat, x) + f.residuals);
  EXPECT_LT((fit_linear(m, again).theta_hat - f.theta_hat).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(GaussNewton, LinearCustomModelConvergesInOneStep) {
  std::mt19937_64 rng(24);
  const auto custom = RegressionModel::custom(
      2, [](const Vector& t, const Vector& x) { return t[0] + t[1] * x[0]; },
      [](const Vector&, const Vector& x) {
        Vector g(2);
        g << 1.0, x[0];
        return g;
      });
  const Matrix x = uniform_matrix(50, 1, rng);
  const Vector y = 2.0 + 3.0 * x.col(0).array() + normal_vector(50, rng).array() * 0.1;
  const Sample s = make_sample(x, y);
  GaussNewtonOptions one;
  one.max_iter = 1;
  const FitResult gn = fit_gauss_newton(custom, s, Vector::Zero(2), one);
  const FitResult closed = fit_linear(RegressionModel::centered_linear(), s);
  const double slope = closed.theta_hat[1];
  const double intercept = closed.theta_hat[0] - slope * x.col(0).mean();
  EXPECT_NEAR(gn.theta_hat[0], intercept, 1e-8);
  EXPECT_NEAR(gn.theta_hat[1], slope, 1e-8);
}

TEST(GaussNewton, RecoversExponentialRateFromNoiselessData) {
  const auto expo = RegressionModel::custom(
      1, [](const Vector& t, const Vector& x) { return std::exp(t[0] * x[0]); },
      [](const Vector& t, const Vector& x) {
        return Vector::Constant(1, x[0] * std::exp(t[0] * x[0]));
      });
  Matrix x(30, 1);
  for (Index i = 0; i < 30; ++i) x(i, 0) = 0.1 * static_cast<double>(i);
  const Vector y = (0.5 * x.col(0).array()).exp();
  const FitResult f = fit_gauss_newton(expo, make_sample(x, y), Vector::Zero(1));
  EXPECT_TRUE(f.converged);
  EXPECT_NEAR(f.theta_hat[0], 0.5, 1e-6);
}

TEST(GaussNewton, ZeroIterationsReturnsStart) {
  const RegressionModel m = make_model("exp_growth");
  const Sample s = make_sample(column({0.1, 0.5, 0.9}), vec({1.0, 2.0, 3.0}));
  GaussNewtonOptions none;
  none.max_iter = 0;
  const FitResult f = fit_gauss_newton(m, s, vec({0.7, 0.2}), none);
  EXPECT_FALSE(f.converged);
  EXPECT_EQ(f.theta_hat, vec({0.7, 0.2}));
  EXPECT_EQ(f.iterations, 0);
}

TEST(GaussNewton, SatisfiesScoreEquation) {
  std::mt19937_64 rng(25);
  const RegressionModel m = make_model("exp_growth");
  const Matrix x = uniform_matrix(300, 1, rng);
  const Sample s = make_sample(x, m.mean(Vector::Ones(2), x) + 0.3 * normal_vector(300, rng));
  const FitResult f = fit(m, s, Vector::Ones(2));
  EXPECT_TRUE(f.converged);
  const Matrix j = m.jacobian(f.theta_hat, x);
  EXPECT_LT((j.transpose() * f.residuals).norm(), 1e-6);
}

TEST(Model, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(26);
  std::normal_distribution<double> z(0.0, 1.0);
  for (const std::string id : model_ids()) {
    const RegressionModel m = make_model(id);
    const Index p = m.covariate_dim().value_or(1);
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix x = uniform_matrix(6, p, rng);
      Vector theta(m.dim());
      for (Index k = 0; k < theta.size(); ++k) theta[k] = z(rng);
      const Matrix j = m.jacobian(theta, x);
      const double h = 1e-6;
      for (Index k = 0; k < theta.size(); ++k) {
        Vector up = theta, down = theta;
        up[k] += h;
        down[k] -= h;
        const Vector fd = (m.mean(up, x) - m.mean(down, x)) / (2.0 * h);
        const double scale = std::max(1.0, j.col(k).cwiseAbs().maxCoeff());
        EXPECT_LT((fd - j.col(k)).cwiseAbs().maxCoeff() / scale, 1e-5) << id;
      }
    }
  }
}

TEST(ScanOrder, AscendingWithTiesByIndex) {
  const Sample s = make_sample(column({0.5, 0.1, 0.5, 0.3}), vec({0, 0, 0, 0}));
  EXPECT_EQ(scan_order(s), (std::vector<Index>{1, 3, 0, 2}));
  Matrix x2(4, 2);
  x2 << 0.9, 0.1, 0.1, 0.2, 0.5, 0.5, 0.3, 0.7;
  EXPECT_EQ(scan_order(make_sample(x2, vec({0, 0, 0, 0}))), identity_order(4));
}

TEST(ScoreBasis, SimpleLinearIsNormalizedCovariate) {
  const Sample s = make_sample(column({3, 1, 2, 5}), vec({1, 2, 3, 4}));
  const RegressionModel m = RegressionModel::simple_linear();
  const FitResult f = fit(m, s, Vector::Ones(1));
  const std::vector<Index> order = scan_order(s);
  const OrthonormalSet mu = score_basis(m, f, s, order);
  const Vector z = vec({1, 2, 3, 5}) / std::sqrt(39.0);
  EXPECT_LT((mu[0].coords() - z).norm(), 1e-14);
}

TEST(ScoreBasis, CenteredLinearIsConstantAndCenteredCovariate) {
  const Sample s = make_sample(column({0.2, 1.4, 0.9, 2.5, 1.0}), vec({1, 2, 3, 4, 5}));
  const RegressionModel m = RegressionModel::centered_linear();
  const FitResult f = fit(m, s, Vector::Ones(2));
  const std::vector<Index> order = scan_order(s);
  const OrthonormalSet mu = score_basis(m, f, s, order);
  const Vector sorted = vec({0.2, 0.9, 1.0, 1.4, 2.5});
  const Vector centered = sorted.array() - sorted.mean();
  EXPECT_LT((mu[0].coords() - Vector::Constant(5, 1.0 / std::sqrt(5.0))).norm(), 1e-14);
  EXPECT_LT((mu[1].coords() - centered / centered.norm()).norm(), 1e-14);
}

TEST(ScoreBasis, DuplicatedGradientColumnsAreRankDeficient) {
  const auto dup = RegressionModel::custom(
      2, [](const Vector& t, const Vector& x) { return (t[0] + t[1]) * x[0]; },
      [](const Vector&, const Vector& x) { return Vector::Constant(2, x[0]); });
  const Sample s = make_sample(column({1, 2, 3, 4}), vec({1, 2, 3, 4}));
  FitResult f;
  f.theta_hat = Vector::Ones(2);
  const Matrix j = dup.jacobian(f.theta_hat, s.covariates);
  f.info_matrix = j.transpose() * j / 4.0;
  EXPECT_THROW(score_basis(dup, f, s, identity_order(4)), RankDeficiencyError);
}

}  // namespace
}  // namespace dfreg
