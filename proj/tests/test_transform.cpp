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
#include <random>

#include <gtest/gtest.h>

#include "dfreg/basis.hpp"
#include "dfreg/error.hpp"
#include "dfreg/harness.hpp"
#include "dfreg/pipeline.hpp"
#include "oracles.hpp"

namespace dfreg {
namespace {

Vector gaussian(Index n, std::mt19937_64& rng) {
  return oracle::gaussian_matrix(static_cast<int>(n), 1, rng).col(0);
}

OrthonormalSet one(const Vector& v) { return OrthonormalSet::from_columns(v / v.norm()); }

TEST(TransformResiduals, SingleVectorMatchesClosedForm) {
  std::mt19937_64 rng(41);
  const Index n = 25;
  Vector z = gaussian(n, rng).cwiseAbs();
  z /= z.norm();
  const Vector r = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Vector eps = gaussian(n, rng);
  eps -= z * z.dot(eps);
  const Vector expected = eps - eps.dot(r) / (1.0 - z.dot(r)) * (r - z);
  const TransformedResiduals t = transform_residuals(eps, one(z), one(r));
  EXPECT_LT((t.e_hat - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(t.e_hat.dot(r), 0.0, 1e-12);
}

TEST(TransformResiduals, EqualSetsLeaveResidualsUnchanged) {
  std::mt19937_64 rng(42);
  const Matrix q = oracle::random_orthonormal(30, 3, rng);
  const Vector eps = gaussian(30, rng);
  const OrthonormalSet s = OrthonormalSet::from_columns(q);
  EXPECT_LT((transform_residuals(eps, s, s).e_hat - eps).norm(), 1e-12);
}

TEST(TransformResiduals, ComplementOfBothSpansIsFixed) {
  std::mt19937_64 rng(43);
  const Matrix mu = oracle::random_orthonormal(20, 2, rng);
  const Matrix r = oracle::random_orthonormal(20, 2, rng);
  Matrix span(20, 4);
  span << mu, r;
  const Matrix q = Eigen::HouseholderQR<Matrix>(span).householderQ() * Matrix::Identity(20, 4);
  Vector eps = gaussian(20, rng);
  eps -= q * (q.transpose() * eps);
  const auto t = transform_residuals(eps, OrthonormalSet::from_columns(mu),
                                     OrthonormalSet::from_columns(r));
  EXPECT_LT((t.e_hat - eps).norm(), 1e-12);
}

TEST(TransformResiduals, UnitaryAndInvertible) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    const int d = 1 + static_cast<int>(seed % 4);
    const Matrix mu = oracle::random_orthonormal(40, d, rng);
    const Matrix r = oracle::random_orthonormal(40, d, rng);
    const Vector eps = gaussian(40, rng);
    const auto t = transform_residuals(eps, OrthonormalSet::from_columns(mu),
                                       OrthonormalSet::from_columns(r));
    EXPECT_NEAR(t.e_hat.norm(), eps.norm(), 1e-10);
    EXPECT_LT((recover_residuals(t) - eps).norm(), 1e-9);
    EXPECT_EQ(t.plan.direction(), Direction::kInverse);
  }
}

TEST(TransformResiduals, StudentizingDividesByResidualScale) {
  std::mt19937_64 rng(44);
  const Matrix mu = oracle::random_orthonormal(30, 2, rng);
  const Matrix r = oracle::random_orthonormal(30, 2, rng);
  Vector eps = 3.0 * gaussian(30, rng);
  eps -= mu * (mu.transpose() * eps);
  TransformOptions opts;
  opts.studentize = true;
  const auto mu_set = OrthonormalSet::from_columns(mu);
  const auto r_set = OrthonormalSet::from_columns(r);
  const auto plain = transform_residuals(eps, mu_set, r_set);
  const auto student = transform_residuals(eps, mu_set, r_set, opts);
  const double scale = std::sqrt(eps.squaredNorm() / 28.0);
  EXPECT_NEAR(student.scale, scale, 1e-14);
  EXPECT_LT((student.e_hat * scale - plain.e_hat).norm(), 1e-12);
  EXPECT_LT((recover_residuals(student) - eps).norm(), 1e-9);
}

TEST(TransformResiduals, RejectsMismatchedInputs) {
  std::mt19937_64 rng(45);
  const auto a = OrthonormalSet::from_columns(oracle::random_orthonormal(10, 2, rng));
  const auto b = OrthonormalSet::from_columns(oracle::random_orthonormal(10, 1, rng));
  EXPECT_THROW(transform_residuals(gaussian(10, rng), a, b), DimensionError);
  EXPECT_THROW(transform_residuals(gaussian(9, rng), a, a), DimensionError);
}

TEST(TransformResiduals, NonConvergedFitIsTaggedUnreliable) {
  std::mt19937_64 rng(46);
  const Matrix mu = oracle::random_orthonormal(12, 1, rng);
  FitResult fit;
  fit.residuals = gaussian(12, rng);
  fit.converged = false;
  std::vector<Index> order(12);
  for (Index i = 0; i < 12; ++i) order[static_cast<std::size_t>(i)] = 11 - i;
  const auto s = OrthonormalSet::from_columns(mu);
  const auto t = transform_residuals(fit, order, s, s);
  EXPECT_FALSE(t.reliable);
  EXPECT_EQ(t.scan_order, order);
  EXPECT_EQ(t.e_hat[0], fit.residuals[11]);
}

// A A^T = I - sum r_k r_k^T for the sets produced by the full pipeline.
void expect_covariance_identity(const std::string& model_id, const std::string& design,
                                Index n, std::uint64_t seed) {
  const RegressionModel model = make_model(model_id);
  const Matrix x = covariate_design(design, n, seed);
  std::mt19937_64 rng(seed);
  const Sample sample = make_sample(x, model.mean(Vector::Ones(model.dim()), x) + gaussian(n, rng));
  const int p = static_cast<int>(x.cols());
  const ReferenceBasis basis = make_basis(p, model.dim());
  const AnchorSet anchors = generate_anchors(n, p, AnchorMode::kHalton);
  const Analysis a = analyze(sample, model, basis, p >= 2 ? &anchors : nullptr);
  const Matrix am = transform_matrix(a.transformed.mu_set, a.transformed.r_set);
  const Matrix r = a.transformed.r_set.as_matrix();
  const Matrix target = Matrix::Identity(n, n) - r * r.transpose();
  EXPECT_LT((am * am.transpose() - target).cwiseAbs().maxCoeff(), 1e-10)
      << model_id << " n=" << n;
  // The dense map reproduces the transformed residuals of this sample.
  const Vector eps = sample.response - model.mean(Vector::Ones(model.dim()), x);
  Vector eps_scan(n);
  for (Index j = 0; j < n; ++j) eps_scan[j] = eps[a.order[static_cast<std::size_t>(j)]];
  EXPECT_LT((am * eps_scan - a.transformed.e_hat).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(TransformMatrix, CovarianceIdentitySimpleLinear) {
  for (Index n : {50, 200}) expect_covariance_identity("simple_linear", "uniform_0_2", n, 1);
}

TEST(TransformMatrix, CovarianceIdentityCenteredLinear) {
  for (Index n : {50, 200}) expect_covariance_identity("centered_linear", "normal_1_2", n, 2);
}

TEST(TransformMatrix, CovarianceIdentityBilinear) {
  for (Index n : {50, 200}) expect_covariance_identity("bilinear2d", "beta_indep", n, 3);
}

TEST(TransformMatrix, RejectsOversizedInput) {
  std::mt19937_64 rng(47);
  const Index n = kMaxDenseTransform + 1;
  Vector v = gaussian(n, rng);
  EXPECT_THROW(transform_matrix(one(v), one(v)), DimensionError);
}

TEST(TransformMonteCarlo, NonlinearModelCovarianceMatchesProjection) {
  const Index n = 500;
  const int reps = 20000;
  const RegressionModel model = make_model("exp_growth");
  Matrix x = uniform_grid(n);
  const Vector theta = Vector::Ones(2);
  const Vector mean = model.mean(theta, x);
  const OrthonormalSet r_set = sample_on_points(make_basis(1, 2), uniform_grid(n));
  const std::vector<Index> order = scan_order(make_sample(x, mean));
  const std::vector<Index> block = {0, 55, 110, 165, 220, 275, 330, 385, 440, 499};

  Matrix sum = Matrix::Zero(10, 10);
  Vector first = Vector::Zero(10);
  std::mt19937_64 rng(48);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int rep = 0; rep < reps; ++rep) {
    Vector y = mean;
    for (Index i = 0; i < n; ++i) y[i] += z(rng);
    const Sample s = make_sample(x, y);
    const FitResult f = fit(model, s, theta);
    ASSERT_TRUE(f.converged);
    const auto t = transform_residuals(f, order, score_basis(model, f, s, order), r_set);
    Vector e(10);
    for (int k = 0; k < 10; ++k) e[k] = t.e_hat[block[static_cast<std::size_t>(k)]];
    sum += e * e.transpose();
    first += e;
  }
  const Matrix cov = sum / reps - (first / reps) * (first / reps).transpose();
  const Matrix r = r_set.as_matrix();
  double worst = 0.0;
  for (int a = 0; a < 10; ++a) {
    for (int b = 0; b < 10; ++b) {
      const Index i = block[static_cast<std::size_t>(a)];
      const Index j = block[static_cast<std::size_t>(b)];
      const double target = (i == j ? 1.0 : 0.0) - r.row(i).dot(r.row(j));
      worst = std::max(worst, std::abs(cov(a, b) - target));
    }
  }
  EXPECT_LT(worst, 5.0 / std::sqrt(static_cast<double>(reps)));
}

}  // namespace
}  // namespace dfreg
