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

#ifndef DFREG_HARNESS_HPP_
#define DFREG_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dfreg/model.hpp"
#include "dfreg/process.hpp"
#include "dfreg/transport.hpp"

namespace dfreg {

enum class ErrorLaw { kNormal, kUniform };

std::string to_string(ErrorLaw law);
ErrorLaw error_law_from_string(const std::string& name);

// Deviation psi added to the null mean: Y = m_theta(X) + a psi(X) + eps,
// with a = amplitude / sqrt(n) under local scaling.
struct Alternative {
  std::string psi;
  double amplitude = 1.0;
  bool local_scaling = false;
};

struct ExperimentConfig {
  std::vector<std::string> designs;
  std::string model = "simple_linear";
  Index n = 200;
  Index reps = 200;
  std::uint64_t seed = 0;
  StatisticKind statistic = StatisticKind::kKsAbs;
  std::optional<Alternative> alternative;
  AnchorMode anchors = AnchorMode::kHalton;
  bool resample_anchors = false;  // fresh anchors per replication
  std::vector<double> theta;      // true parameter; empty means all ones
  ErrorLaw errors = ErrorLaw::kNormal;
  double error_scale = 1.0;       // errors are error_scale times a unit-variance draw
  int grid_resolution = 0;        // 0: default_grid_resolution(p)
  bool studentize = false;
  std::vector<double> levels = {0.05};
  Index null_reps = 0;            // paired null size for power runs; 0 means reps
};

// Throws ConfigError describing the first invalid field.
void validate(const ExperimentConfig& config);

// Built-in regression models: simple_linear, centered_linear, bilinear2d,
// quadratic (1, x, x^2), exp_growth (theta_0 exp(theta_1 x)).
RegressionModel make_model(const std::string& id);
std::vector<std::string> model_ids();

// Built-in covariate designs:
//   uniform_0_2  X ~ U[0,2]                                  (p = 1)
//   normal_1_2   X ~ N(1, 2), variance 2                     (p = 1)
//   beta_dep_a   X1 ~ U[0,1], X2 | X1 ~ Beta(8(1-X1), 8 X1)  (p = 2)
//   beta_dep_b   X1 ~ U[0,1], X2 | X1 ~ Beta(8 X1, 8(1-X1))  (p = 2)
//   beta_indep   X1 ~ Beta(0.35,0.35), X2 ~ Beta(0.2,0.2)    (p = 2)
Matrix covariate_design(const std::string& id, Index n, std::uint64_t seed);
int design_dimension(const std::string& id);
std::vector<std::string> design_ids();

// Deviation directions: x_squared (x_1^2), x2_squared, x2_cubed,
// sin_half_pi_x2 (sin(pi x_2 / 2)).
std::function<double(const Vector&)> psi_function(const std::string& id);
std::vector<std::string> psi_ids();

// Replication statistics sorted ascending.
class Ecdf {
 public:
  Ecdf() = default;
  static Ecdf from_values(std::vector<double> values);

  const std::vector<double>& sorted_values() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }
  bool empty() const { return sorted_.empty(); }

  // Fraction of values <= x.
  double operator()(double x) const;
  // Upper critical value at `level`: the ceil((1 - level) r)-th order
  // statistic. A statistic strictly above it rejects.
  double critical_value(double level) const;
  // Fraction of values strictly above `critical`.
  double exceedance(double critical) const;

 private:
  std::vector<double> sorted_;
};

// Two-sample Kolmogorov distance sup_x |A(x) - B(x)| between step ECDFs,
// exact by merging the sorted values.
double ecdf_sup_distance(const Ecdf& a, const Ecdf& b);

// One-sample distance sup_x |A(x) - F(x)| against a continuous CDF.
double ecdf_sup_distance(const Ecdf& a, const std::function<double(double)>& cdf);

struct SimulationRun {
  std::string design;
  std::uint64_t seed = 0;  // effective seed of this run
  Ecdf transformed;        // statistic of the rotated (distribution-free) process
  Ecdf raw;                // same statistic of the raw regression process
  Index attempted = 0;
  Index failures = 0;      // fit errors or non-convergence; excluded
  double elapsed_seconds = 0.0;
  std::string basis_description;
};

// Seed of the null run for `design`: derive_seed(config.seed, "design:" + design).
std::uint64_t design_seed(const ExperimentConfig& config, const std::string& design);
// Seed of the alternative run: derive_seed(config.seed, "power:" + design).
std::uint64_t power_seed(const ExperimentConfig& config, const std::string& design);

// Runs task(0..count-1) on up to `workers` threads pulling indices from a
// shared counter. The first exception is rethrown after all threads join.
void parallel_for(Index count, int workers, const std::function<void(Index)>& task);

using CovariateSource = std::function<Matrix(std::uint64_t seed)>;

// Generic replication engine. Replication r draws covariates from
// `covariates(derive_seed(seed, "covariates", r))`, errors from
// derive_seed(seed, "errors", r) and, when resampling, anchors from
// derive_seed(seed, "anchors", r); fixed anchors use derive_seed(seed,
// "anchors"). Results are collected by index, so the output is identical for
// any `workers`. More than 1% failed replications raises SimulationError.
SimulationRun run_replications(const ExperimentConfig& config,
                               const CovariateSource& covariates, std::uint64_t seed,
                               Index reps, bool apply_alternative, int workers);

// Null distribution of the configured statistic for one design.
SimulationRun simulate_null(const ExperimentConfig& config, const std::string& design,
                            int workers = 1);

// Seed of a fixed-design null run: derive_seed(config.seed, "fixed-design").
std::uint64_t fixed_design_seed(const ExperimentConfig& config);

// Null distribution conditional on fixed covariates (n = covariates.rows()).
SimulationRun simulate_null_fixed(const ExperimentConfig& config, const Matrix& covariates,
                                  int workers = 1);

struct PowerResult {
  SimulationRun null_run;
  SimulationRun alternative_run;
  std::map<double, double> critical_value_at;      // transformed, from null_run
  std::map<double, double> rejection_rate_at;      // transformed
  std::map<double, double> raw_critical_value_at;  // raw process
  std::map<double, double> raw_rejection_rate_at;  // raw process
};

// Alternative run plus the paired null run (the simulate_null run of the same
// design with null_reps replications); rejection rates use the null's
// critical values at each configured level.
PowerResult simulate_power(const ExperimentConfig& config, const std::string& design,
                           int workers = 1);

}  // namespace dfreg

#endif  // DFREG_HARNESS_HPP_
