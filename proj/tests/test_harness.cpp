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

#include "dfreg/harness.hpp"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "dfreg/error.hpp"
#include "dfreg/rng.hpp"

namespace dfreg {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.designs = {"uniform_0_2"};
  c.n = 50;
  c.reps = 200;
  c.seed = 11;
  return c;
}

TEST(Designs, RangesAndDimensions) {
  for (const auto& id : design_ids()) {
    const Matrix x = covariate_design(id, 500, 3);
    EXPECT_EQ(x.rows(), 500);
    EXPECT_EQ(x.cols(), design_dimension(id));
    EXPECT_TRUE(x.allFinite());
    EXPECT_EQ(x, covariate_design(id, 500, 3)) << id;
    EXPECT_NE(x, covariate_design(id, 500, 4)) << id;
  }
  const Matrix u = covariate_design("uniform_0_2", 2000, 5);
  EXPECT_GE(u.minCoeff(), 0.0);
  EXPECT_LE(u.maxCoeff(), 2.0);
  EXPECT_NEAR(u.mean(), 1.0, 0.06);
  const Matrix g = covariate_design("normal_1_2", 20000, 6);
  const double m = g.mean();
  EXPECT_NEAR(m, 1.0, 0.05);
  EXPECT_NEAR((g.array() - m).square().mean(), 2.0, 0.1);
  for (const char* id : {"beta_dep_a", "beta_dep_b", "beta_indep"}) {
    const Matrix b = covariate_design(id, 2000, 7);
    EXPECT_GE(b.minCoeff(), 0.0);
    EXPECT_LE(b.maxCoeff(), 1.0);
  }
  EXPECT_THROW(covariate_design("uniform", 10, 1), DomainError);
  EXPECT_THROW(covariate_design("uniform_0_2", 0, 1), DomainError);
}

TEST(Designs, DependentDesignsCouple) {
  const Matrix a = covariate_design("beta_dep_a", 5000, 8);
  const Matrix b = covariate_design("beta_dep_b", 5000, 8);
  const auto corr = [](const Matrix& x) {
    const Vector u = x.col(0).array() - x.col(0).mean();
    const Vector v = x.col(1).array() - x.col(1).mean();
    return u.dot(v) / (u.norm() * v.norm());
  };
  EXPECT_LT(corr(a), -0.5);
  EXPECT_GT(corr(b), 0.5);
}

TEST(Models, IdsAndShapes) {
  for (const auto& id : model_ids()) EXPECT_EQ(make_model(id).name(), id);
  EXPECT_EQ(make_model("bilinear2d").dim(), 4);
  EXPECT_THROW(make_model("cubic"), DomainError);
  for (const auto& id : psi_ids()) EXPECT_TRUE(psi_function(id));
  EXPECT_THROW(psi_function("x3"), DomainError);
}

TEST(EcdfTest, EvaluationAndQuantiles) {
  const Ecdf e = Ecdf::from_values({4, 1, 3, 2, 5, 6, 7, 8, 9, 10});
  EXPECT_EQ(e(0.5), 0.0);
  EXPECT_EQ(e(1.0), 0.1);
  EXPECT_EQ(e(5.5), 0.5);
  EXPECT_EQ(e(10.0), 1.0);
  EXPECT_EQ(e.critical_value(0.1), 9.0);
  EXPECT_EQ(e.critical_value(0.05), 10.0);
  EXPECT_EQ(e.critical_value(0.5), 5.0);
  EXPECT_DOUBLE_EQ(e.exceedance(9.0), 0.1);
  EXPECT_THROW(Ecdf().critical_value(0.05), DomainError);
}

TEST(EcdfTest, SupDistance) {
  EXPECT_DOUBLE_EQ(ecdf_sup_distance(Ecdf::from_values({1, 3}), Ecdf::from_values({2, 4})),
                   0.5);
  EXPECT_EQ(ecdf_sup_distance(Ecdf::from_values({1, 2, 2}), Ecdf::from_values({2, 1, 2})),
            0.0);
  EXPECT_EQ(ecdf_sup_distance(Ecdf::from_values({1, 2}), Ecdf::from_values({5, 6})), 1.0);
  const Ecdf single = Ecdf::from_values({0.5});
  EXPECT_DOUBLE_EQ(ecdf_sup_distance(single, [](double x) { return x; }), 0.5);
  EXPECT_THROW(ecdf_sup_distance(Ecdf(), single), DomainError);
}

TEST(Seeds, DeriveSeed) {
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100; ++i) seen.insert(derive_seed(1, "errors", i));
  seen.insert(derive_seed(1, "covariates", 0));
  seen.insert(derive_seed(2, "errors", 0));
  EXPECT_EQ(seen.size(), 102u);
  EXPECT_EQ(derive_seed(9, "x", 3), derive_seed(9, "x", 3));
  const ExperimentConfig c = small_config();
  EXPECT_NE(design_seed(c, "uniform_0_2"), design_seed(c, "normal_1_2"));
  EXPECT_NE(design_seed(c, "uniform_0_2"), power_seed(c, "uniform_0_2"));
}

TEST(Validate, RejectsBadConfigs) {
  ExperimentConfig c = small_config();
  EXPECT_NO_THROW(validate(c));
  auto bad = [&](auto mutate) {
    ExperimentConfig d = small_config();
    mutate(d);
    EXPECT_THROW(validate(d), ConfigError);
  };
  bad([](ExperimentConfig& d) { d.designs.clear(); });
  bad([](ExperimentConfig& d) { d.designs = {"nope"}; });
  bad([](ExperimentConfig& d) { d.model = "nope"; });
  bad([](ExperimentConfig& d) { d.model = "bilinear2d"; });
  bad([](ExperimentConfig& d) { d.n = 5; });
  bad([](ExperimentConfig& d) { d.reps = 0; });
  bad([](ExperimentConfig& d) { d.theta = {1.0, 2.0}; });
  bad([](ExperimentConfig& d) { d.levels = {1.5}; });
  bad([](ExperimentConfig& d) { d.error_scale = -1.0; });
  bad([](ExperimentConfig& d) { d.alternative = Alternative{"bogus", 1.0, false}; });
}

TEST(Simulation, SingleReplication) {
  ExperimentConfig c = small_config();
  c.reps = 1;
  const SimulationRun run = simulate_null(c, "uniform_0_2");
  EXPECT_EQ(run.transformed.size(), 1u);
  EXPECT_EQ(run.raw.size(), 1u);
  EXPECT_EQ(run.failures, 0);
}

TEST(Simulation, WorkerCountDoesNotChangeResults) {
  ExperimentConfig c = small_config();
  c.designs = {"beta_indep"};
  c.model = "bilinear2d";
  c.n = 30;
  c.reps = 24;
  c.grid_resolution = 8;
  const SimulationRun one = simulate_null(c, "beta_indep", 1);
  const SimulationRun three = simulate_null(c, "beta_indep", 3);
  EXPECT_EQ(one.transformed.sorted_values(), three.transformed.sorted_values());
  EXPECT_EQ(one.raw.sorted_values(), three.raw.sorted_values());
}

TEST(Simulation, TransformedNullDoesNotDependOnDesign) {
  ExperimentConfig c = small_config();
  c.reps = 1000;
  const SimulationRun a = simulate_null(c, "uniform_0_2");
  const SimulationRun b = simulate_null(c, "normal_1_2");
  const double bound = 2.0 * 1.36 * std::sqrt(2.0 / 1000.0);
  EXPECT_LT(ecdf_sup_distance(a.transformed, b.transformed), bound);
}

TEST(Simulation, ThetaDoesNotMatterForLinearModels) {
  ExperimentConfig c = small_config();
  c.reps = 50;
  const SimulationRun a = simulate_null(c, "uniform_0_2");
  c.theta = {-4.0};
  const SimulationRun b = simulate_null(c, "uniform_0_2");
  for (std::size_t i = 0; i < a.transformed.size(); ++i) {
    EXPECT_NEAR(a.transformed.sorted_values()[i], b.transformed.sorted_values()[i], 1e-9);
  }
}

TEST(Simulation, ZeroAmplitudeMatchesNull) {
  ExperimentConfig c = small_config();
  c.reps = 400;
  c.alternative = Alternative{"x_squared", 0.0, false};
  const PowerResult r = simulate_power(c, "uniform_0_2");
  const double n1 = 400.0;
  const double bound = 2.0 * 1.36 * std::sqrt(2.0 / n1);
  EXPECT_LT(ecdf_sup_distance(r.null_run.transformed, r.alternative_run.transformed), bound);
  EXPECT_NEAR(r.rejection_rate_at.at(0.05), 0.05, 0.035);
}

TEST(Simulation, UniformErrors) {
  ExperimentConfig c = small_config();
  c.errors = ErrorLaw::kUniform;
  c.reps = 100;
  const SimulationRun run = simulate_null(c, "uniform_0_2");
  EXPECT_EQ(run.transformed.size(), 100u);
  EXPECT_EQ(error_law_from_string(to_string(ErrorLaw::kUniform)), ErrorLaw::kUniform);
  EXPECT_THROW(error_law_from_string("cauchy"), DomainError);
}

TEST(Simulation, FailurePolicy) {
  ExperimentConfig c = small_config();
  const auto source_with_failures = [&](std::uint64_t bad) {
    return [&c, bad](std::uint64_t s) -> Matrix {
      for (std::uint64_t r = 0; r < bad; ++r) {
        if (s == derive_seed(123, "covariates", r + 1)) return Matrix::Zero(c.n, 1);
      }
      return covariate_design("uniform_0_2", c.n, s);
    };
  };
  const SimulationRun ok = run_replications(c, source_with_failures(1), 123, 200, false, 1);
  EXPECT_EQ(ok.failures, 1);
  EXPECT_EQ(ok.transformed.size(), 199u);
  EXPECT_THROW(run_replications(c, source_with_failures(5), 123, 200, false, 1),
               SimulationError);
}

TEST(Simulation, ParallelForVisitsEachIndexOnce) {
  std::vector<int> hits(37, 0);
  parallel_for(37, 4, [&](Index i) { ++hits[static_cast<std::size_t>(i)]; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

}  // namespace
}  // namespace dfreg
