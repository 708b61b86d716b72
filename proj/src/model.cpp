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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dfreg/error.hpp"

namespace dfreg {

Sample make_sample(Matrix covariates, Vector response) {
  if (covariates.rows() != response.size()) {
    throw DimensionError("Sample: " + std::to_string(covariates.rows()) +
                         " covariate rows but " + std::to_string(response.size()) +
                         " responses");
  }
  if (covariates.cols() < 1) throw DimensionError("Sample: no covariate columns");
  if (!covariates.allFinite() || !response.allFinite()) {
    throw DomainError("Sample: non-finite entry");
  }
  if (covariates.rows() < covariates.cols() + 1) {
    throw DimensionError("Sample: need n >= p + 1 observations");
  }
  return Sample{std::move(covariates), std::move(response)};
}

RegressionModel RegressionModel::simple_linear() {
  RegressionModel m(ModelKind::kSimpleLinear, 1, "simple_linear", 1);
  m.design_ = [](const Matrix& x) -> Matrix { return x.col(0); };
  return m;
}

RegressionModel RegressionModel::centered_linear() {
  RegressionModel m(ModelKind::kCenteredLinear, 2, "centered_linear", 1);
  m.design_ = [](const Matrix& x) -> Matrix {
    Matrix d(x.rows(), 2);
    d.col(0).setOnes();
    d.col(1) = x.col(0).array() - x.col(0).mean();
    return d;
  };
  return m;
}

RegressionModel RegressionModel::bilinear2d() {
  RegressionModel m(ModelKind::kBilinear2d, 4, "bilinear2d", 2);
  m.design_ = [](const Matrix& x) -> Matrix {
    Matrix d(x.rows(), 4);
    const Vector prod = x.col(0).cwiseProduct(x.col(1));
    d.col(0).setOnes();
    d.col(1) = x.col(0).array() - x.col(0).mean();
    d.col(2) = x.col(1).array() - x.col(1).mean();
    d.col(3) = prod.array() - prod.mean();
    return d;
  };
  return m;
}

RegressionModel RegressionModel::basis_linear(std::vector<BasisFunction> functions,
                                              std::string name,
                                              std::optional<int> covariate_dim) {
  if (functions.empty()) throw DomainError("basis_linear: no basis functions");
  RegressionModel m(ModelKind::kBasisLinear, static_cast<int>(functions.size()),
                    std::move(name), covariate_dim);
  m.design_ = [fs = std::move(functions)](const Matrix& x) -> Matrix {
    Matrix d(x.rows(), static_cast<Index>(fs.size()));
    for (Index i = 0; i < x.rows(); ++i) {
      const Vector xi = x.row(i).transpose();
      for (std::size_t k = 0; k < fs.size(); ++k) d(i, static_cast<Index>(k)) = fs[k](xi);
    }
    return d;
  };
  return m;
}

RegressionModel RegressionModel::custom(int d, PointMean mean, PointGrad grad,
                                        std::string name,
                                        std::optional<int> covariate_dim) {
  if (d < 1) throw DomainError("custom model: parameter dimension must be >= 1");
  RegressionModel m(ModelKind::kCustom, d, std::move(name), covariate_dim);
  m.point_mean_ = std::move(mean);
  m.point_grad_ = std::move(grad);
  return m;
}

void RegressionModel::check_inputs(const Vector& theta, const Matrix& x) const {
  if (theta.size() != d_) {
    throw DimensionError(name_ + ": theta has length " + std::to_string(theta.size()) +
                         ", model dimension is " + std::to_string(d_));
  }
  if (covariate_dim_ && x.cols() != *covariate_dim_) {
    throw DimensionError(name_ + ": expects " + std::to_string(*covariate_dim_) +
                         " covariate column(s), got " + std::to_string(x.cols()));
  }
}

Vector RegressionModel::mean(const Vector& theta, const Matrix& x) const {
  check_inputs(theta, x);
  if (is_linear()) return design_(x) * theta;
  Vector out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) out[i] = point_mean_(theta, x.row(i).transpose());
  return out;
}

Matrix RegressionModel::jacobian(const Vector& theta, const Matrix& x) const {
  check_inputs(theta, x);
  if (is_linear()) return design_(x);
  Matrix out(x.rows(), d_);
  for (Index i = 0; i < x.rows(); ++i) {
    const Vector g = point_grad_(theta, x.row(i).transpose());
    if (g.size() != d_) throw DimensionError(name_ + ": gradient has wrong length");
    out.row(i) = g.transpose();
  }
  return out;
}

namespace {

void check_sample_fits_model(const RegressionModel& model, const Sample& sample) {
  if (sample.size() < model.dim() + 1) {
    throw DimensionError("fit: need n >= d + 1 observations");
  }
}

Matrix info_matrix(const Matrix& jac) {
  return (jac.transpose() * jac) / static_cast<double>(jac.rows());
}

}  // namespace

FitResult fit_linear(const RegressionModel& model, const Sample& sample) {
  if (!model.is_linear()) {
    throw DomainError("fit_linear: model '" + model.name() + "' is not linear");
  }
  check_sample_fits_model(model, sample);
  const Vector zero = Vector::Zero(model.dim());
  const Matrix design = model.jacobian(zero, sample.covariates);
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < model.dim()) {
    throw SingularityError("fit_linear: design matrix has rank " +
                           std::to_string(qr.rank()) + " < " +
                           std::to_string(model.dim()));
  }
  FitResult out;
  out.theta_hat = qr.solve(sample.response);
  // One refinement step keeps the normal equations at rounding level.
  const Vector r0 = sample.response - design * out.theta_hat;
  out.theta_hat += qr.solve(r0);
  out.residuals = sample.response - design * out.theta_hat;
  out.info_matrix = info_matrix(design);
  out.converged = true;
  out.iterations = 1;
  return out;
}

FitResult fit_gauss_newton(const RegressionModel& model, const Sample& sample,
                           const Vector& theta0, const GaussNewtonOptions& opts) {
  check_sample_fits_model(model, sample);
  if (theta0.size() != model.dim() || !theta0.allFinite()) {
    throw DomainError("fit_gauss_newton: theta0 must be finite with length d");
  }
  const Matrix& x = sample.covariates;
  const Vector& y = sample.response;

  Vector theta = theta0;
  Vector resid = y - model.mean(theta, x);
  double sse = resid.squaredNorm();
  bool converged = false;
  int iterations = 0;

  for (int it = 0; it < opts.max_iter; ++it) {
    const Matrix jac = model.jacobian(theta, x);
    const Vector grad = jac.transpose() * resid;
    if (2.0 * grad.norm() < opts.grad_tol) {
      converged = true;
      break;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(jac);
    qr.setThreshold(1e-10);
    if (qr.rank() < model.dim()) {
      throw SingularityError("fit_gauss_newton: R_n is singular at iteration " +
                             std::to_string(it));
    }
    const Vector step = qr.solve(resid);
    iterations = it + 1;

    double scale = 1.0;
    bool accepted = false;
    Vector trial;
    Vector trial_resid;
    for (int halving = 0; halving < 60; ++halving, scale *= 0.5) {
      trial = theta + scale * step;
      trial_resid = y - model.mean(trial, x);
      const double trial_sse = trial_resid.squaredNorm();
      if (std::isfinite(trial_sse) && trial_sse <= sse) {
        accepted = true;
        sse = trial_sse;
        break;
      }
    }
    if (!accepted) {
      // No descent along the Gauss-Newton direction: stationary up to rounding
      // if the step itself is negligible, stuck otherwise.
      converged = step.norm() < opts.step_tol;
      break;
    }
    const double taken = (trial - theta).norm();
    theta = trial;
    resid = trial_resid;
    if (taken < opts.step_tol) {
      converged = true;
      break;
    }
  }

  FitResult out;
  out.theta_hat = theta;
  out.residuals = resid;
  out.info_matrix = info_matrix(model.jacobian(theta, x));
  out.converged = converged;
  out.iterations = iterations;
  return out;
}

FitResult fit(const RegressionModel& model, const Sample& sample,
              const Vector& theta0, const GaussNewtonOptions& opts) {
  if (model.is_linear()) return fit_linear(model, sample);
  return fit_gauss_newton(model, sample, theta0, opts);
}

std::vector<Index> scan_order(const Sample& sample) {
  std::vector<Index> order(static_cast<std::size_t>(sample.size()));
  std::iota(order.begin(), order.end(), Index{0});
  if (sample.dim() == 1) {
    const auto& x = sample.covariates;
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return x(a, 0) < x(b, 0); });
  }
  return order;
}

OrthonormalSet score_basis(const RegressionModel& model, const FitResult& fit,
                           const Sample& sample, std::span<const Index> order) {
  const Index n = sample.size();
  if (static_cast<Index>(order.size()) != n) {
    throw DimensionError("score_basis: scan order has wrong length");
  }
  const Matrix jac = model.jacobian(fit.theta_hat, sample.covariates);
  {
    // Names the first dependent gradient column before R_n is inverted.
    std::vector<Vector> columns;
    for (int k = 0; k < model.dim(); ++k) columns.push_back(jac.col(k));
    gram_schmidt(columns);
  }
  const Matrix normalizer = inv_sqrt_spd(fit.info_matrix);
  const Matrix mu = jac * normalizer / std::sqrt(static_cast<double>(n));
  std::vector<Vector> vectors;
  vectors.reserve(static_cast<std::size_t>(model.dim()));
  for (int k = 0; k < model.dim(); ++k) {
    Vector v(n);
    for (Index j = 0; j < n; ++j) v[j] = mu(order[static_cast<std::size_t>(j)], k);
    vectors.push_back(std::move(v));
  }
  return gram_schmidt(vectors);
}

}  // namespace dfreg
