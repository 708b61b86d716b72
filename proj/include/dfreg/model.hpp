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

#ifndef DFREG_MODEL_HPP_
#define DFREG_MODEL_HPP_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfreg/rotations.hpp"

namespace dfreg {

// Observations (X_i, Y_i): X is n x p, Y has length n.
struct Sample {
  Matrix covariates;
  Vector response;

  Index size() const { return covariates.rows(); }
  int dim() const { return static_cast<int>(covariates.cols()); }
};

// Checks sizes and finiteness; throws DimensionError / DomainError.
Sample make_sample(Matrix covariates, Vector response);

enum class ModelKind {
  kSimpleLinear,    // theta * x
  kCenteredLinear,  // theta_0 + theta_1 (x - mean(x))
  kBasisLinear,     // sum_k theta_k f_k(x)
  kBilinear2d,      // theta_0 + theta_10 (x1 - m1) + theta_01 (x2 - m2)
                    //   + theta_11 (x1 x2 - mean(x1 x2))
  kCustom,
};

// Mean function m_theta and its parameter gradient, evaluated over a whole
// covariate matrix so that sample-centered models (whose centering constants
// are sample means) fit the same interface as pointwise ones.
//
// Custom models must be free of hidden mutable state: the harness evaluates
// one model from several threads at once.
class RegressionModel {
 public:
  using PointMean = std::function<double(const Vector& theta, const Vector& x)>;
  using PointGrad = std::function<Vector(const Vector& theta, const Vector& x)>;
  using BasisFunction = std::function<double(const Vector& x)>;

  static RegressionModel simple_linear();
  static RegressionModel centered_linear();
  static RegressionModel bilinear2d();
  static RegressionModel basis_linear(std::vector<BasisFunction> functions,
                                      std::string name = "basis_linear",
                                      std::optional<int> covariate_dim = {});
  static RegressionModel custom(int d, PointMean mean, PointGrad grad,
                                std::string name = "custom",
                                std::optional<int> covariate_dim = {});

  ModelKind kind() const { return kind_; }
  int dim() const { return d_; }
  bool is_linear() const { return kind_ != ModelKind::kCustom; }
  // Required number of covariate columns, if the model fixes one.
  std::optional<int> covariate_dim() const { return covariate_dim_; }
  const std::string& name() const { return name_; }

  // m_theta(X_i) for every row.
  Vector mean(const Vector& theta, const Matrix& x) const;
  // n x d matrix whose row i is the gradient of m_theta(X_i) in theta.
  Matrix jacobian(const Vector& theta, const Matrix& x) const;

 private:
  using Design = std::function<Matrix(const Matrix&)>;
  RegressionModel(ModelKind kind, int d, std::string name,
                  std::optional<int> covariate_dim)
      : kind_(kind), d_(d), name_(std::move(name)), covariate_dim_(covariate_dim) {}

  void check_inputs(const Vector& theta, const Matrix& x) const;

  ModelKind kind_;
  int d_;
  std::string name_;
  std::optional<int> covariate_dim_;
  Design design_;  // linear kinds
  PointMean point_mean_;
  PointGrad point_grad_;
};

// Least-squares fit; residuals are Y - m_theta_hat(X) in the sample's
// original order, info_matrix is R_n = (1/n) J^T J at theta_hat.
struct FitResult {
  Vector theta_hat;
  Vector residuals;
  Matrix info_matrix;
  bool converged = false;
  int iterations = 0;
};

// Closed-form least squares for the linear kinds (column-pivoted QR).
// Throws SingularityError for a rank-deficient design, DomainError for a
// custom model.
FitResult fit_linear(const RegressionModel& model, const Sample& sample);

struct GaussNewtonOptions {
  int max_iter = 100;
  double step_tol = 1e-10;
  double grad_tol = 1e-8;
};

// Damped Gauss-Newton with step halving on the residual sum of squares.
// Stops when the accepted step is shorter than step_tol, when the SSE
// gradient norm 2‖J^T r‖ drops below grad_tol, or after max_iter iterations
// (converged = false). Throws SingularityError if J loses rank at an iterate.
FitResult fit_gauss_newton(const RegressionModel& model, const Sample& sample,
                           const Vector& theta0, const GaussNewtonOptions& opts = {});

// fit_linear for linear kinds, fit_gauss_newton from theta0 otherwise.
FitResult fit(const RegressionModel& model, const Sample& sample,
              const Vector& theta0, const GaussNewtonOptions& opts = {});

// Ascending covariate order with ties broken by index when p = 1; identity
// for p >= 2.
std::vector<Index> scan_order(const Sample& sample);

// The normalized score vectors mu_k = R_n^{-1/2} grad m(theta_hat, X_i) / sqrt(n),
// entries permuted by `order`, then orthonormalized exactly.
OrthonormalSet score_basis(const RegressionModel& model, const FitResult& fit,
                           const Sample& sample, std::span<const Index> order);

}  // namespace dfreg

#endif  // DFREG_MODEL_HPP_
