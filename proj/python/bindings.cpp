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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dfreg/basis.hpp"
#include "dfreg/config.hpp"
#include "dfreg/error.hpp"
#include "dfreg/harness.hpp"
#include "dfreg/pipeline.hpp"
#include "dfreg/rng.hpp"
#include "dfreg/transform.hpp"

namespace py = pybind11;
using namespace py::literals;

namespace dfreg {
namespace {

py::dict statistics_dict(const StepProcess& process) {
  py::dict d;
  for (const auto& r : ks_statistics(process)) d[to_string(r.name).c_str()] = r.value;
  return d;
}

py::dict run_dict(const SimulationRun& run) {
  return py::dict("design"_a = run.design, "seed"_a = run.seed,
                  "transformed"_a = run.transformed.sorted_values(),
                  "raw"_a = run.raw.sorted_values(), "attempted"_a = run.attempted,
                  "failures"_a = run.failures, "basis"_a = run.basis_description);
}

py::dict assignment_dict(const Assignment& a) {
  return py::dict("sigma"_a = a.sigma, "pair_costs"_a = a.pair_costs, "cost"_a = a.cost);
}

}  // namespace
}  // namespace dfreg

PYBIND11_MODULE(_dfreg, m) {
  using namespace dfreg;
  m.doc() = "Distribution-free regression residuals and empirical-process tests";

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  auto singular = py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
  py::register_exception<RankDeficiencyError>(m, "RankDeficiencyError", singular.ptr());
  py::register_exception<SimulationError>(m, "SimulationError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  // rotations
  m.def("reflect",
        [](const Vector& a, const Vector& b, const Vector& v) {
          return reflect(UnitVector(a), UnitVector(b), v);
        },
        "a"_a, "b"_a, "v"_a, "U_{a,b} v: swaps the unit vectors a and b.");
  m.def("rotation_matrix",
        [](const Matrix& source, const Matrix& target) {
          // build_plan maps target -> source; the inverse sends source_k to target_k.
          return plan_matrix(build_plan(OrthonormalSet::from_columns(source),
                                        OrthonormalSet::from_columns(target))
                                 .inverted());
        },
        "source"_a, "target"_a,
        "Dense K with K source_k = target_k for the orthonormal columns.");
  m.def("apply_rotation",
        [](const Matrix& source, const Matrix& target, const Vector& v, bool inverse) {
          RotationPlan plan = build_plan(OrthonormalSet::from_columns(source),
                                         OrthonormalSet::from_columns(target));
          return apply_plan(inverse ? plan : plan.inverted(), v);
        },
        "source"_a, "target"_a, "v"_a, "inverse"_a = false);

  // model
  m.def("model_ids", &model_ids);
  m.def("fit",
        [](const std::string& model_id, const Matrix& x, const Vector& y,
           std::optional<Vector> theta0) {
          const RegressionModel model = make_model(model_id);
          const FitResult f = fit(model, make_sample(x, y),
                                  theta0 ? *theta0 : Vector::Ones(model.dim()));
          return py::dict("theta_hat"_a = f.theta_hat, "residuals"_a = f.residuals,
                          "info_matrix"_a = f.info_matrix, "converged"_a = f.converged,
                          "iterations"_a = f.iterations);
        },
        "model"_a, "x"_a, "y"_a, "theta0"_a = py::none());

  // basis
  m.def("legendre_shifted", &legendre_shifted, "degree"_a, "t"_a);
  m.def("reference_vectors",
        [](int p, int d, const Matrix& points) {
          return sample_on_points(make_basis(p, d), points).as_matrix();
        },
        "p"_a, "d"_a, "points"_a, "Orthonormal n x d matrix of sampled reference functions.");
  m.def("basis_description", [](int p, int d) { return make_basis(p, d).describe(); },
        "p"_a, "d"_a);

  // transform
  m.def("transform_residuals",
        [](const Vector& eps_hat, const Matrix& mu, const Matrix& r, bool studentize) {
          TransformOptions opts;
          opts.studentize = studentize;
          return transform_residuals(eps_hat, OrthonormalSet::from_columns(mu),
                                     OrthonormalSet::from_columns(r), opts)
              .e_hat;
        },
        "eps_hat"_a, "mu"_a, "r"_a, "studentize"_a = false);
  m.def("transform_matrix",
        [](const Matrix& mu, const Matrix& r) {
          return transform_matrix(OrthonormalSet::from_columns(mu),
                                  OrthonormalSet::from_columns(r));
        },
        "mu"_a, "r"_a);

  // transport
  m.def("generate_anchors",
        [](Index n, int p, const std::string& mode, std::uint64_t seed) {
          return generate_anchors(n, p, anchor_mode_from_string(mode), seed).points;
        },
        "n"_a, "p"_a, "mode"_a = "halton", "seed"_a = 0);
  m.def("solve_assignment",
        [](const Matrix& x, const Matrix& anchors) {
          return assignment_dict(solve_assignment(x, anchors));
        },
        "x"_a, "anchors"_a);
  m.def("brute_force_assignment",
        [](const Matrix& x, const Matrix& anchors) {
          return assignment_dict(brute_force_assignment(x, anchors));
        },
        "x"_a, "anchors"_a);

  // process
  m.def("kolmogorov_cdf", &kolmogorov_cdf, "x"_a);
  m.def("limit_covariance",
        [](const Vector& x, const Vector& y, int d) {
          return limit_covariance(x, y, make_basis(static_cast<int>(x.size()), d));
        },
        "x"_a, "y"_a, "d"_a);
  m.def("process_statistics",
        [](const Vector& residuals, const Matrix& scan_points, int grid_resolution) {
          return statistics_dict(build_process(residuals, scan_points, {grid_resolution}));
        },
        "residuals"_a, "scan_points"_a, "grid_resolution"_a = 0);

  // pipeline
  m.def("analyze",
        [](const std::string& model_id, const Matrix& x, const Vector& y,
           const std::string& anchors, std::uint64_t seed, int grid_resolution,
           bool studentize) {
          const RegressionModel model = make_model(model_id);
          const Sample sample = make_sample(x, y);
          const int p = static_cast<int>(x.cols());
          const ReferenceBasis basis = make_basis(p, model.dim());
          std::optional<AnchorSet> a;
          if (p >= 2) a = generate_anchors(x.rows(), p, anchor_mode_from_string(anchors), seed);
          AnalysisOptions opts;
          opts.grid.resolution = grid_resolution;
          opts.transform.studentize = studentize;
          opts.theta0 = Vector::Ones(model.dim());
          const Analysis r = analyze(sample, model, basis, a ? &*a : nullptr, opts);
          return py::dict("theta_hat"_a = r.fit.theta_hat, "order"_a = r.order,
                          "residuals"_a = r.raw_residuals, "e_hat"_a = r.transformed.e_hat,
                          "scan_points"_a = r.scan_points,
                          "transformed"_a = statistics_dict(r.transformed_process),
                          "raw"_a = statistics_dict(r.raw_process),
                          "basis"_a = basis.describe());
        },
        "model"_a, "x"_a, "y"_a, "anchors"_a = "halton", "seed"_a = 0,
        "grid_resolution"_a = 0, "studentize"_a = false);

  // harness
  m.def("derive_seed", [](std::uint64_t master, const std::string& purpose,
                          std::uint64_t index) { return derive_seed(master, purpose, index); },
        "master"_a, "purpose"_a, "index"_a = 0);
  m.def("design_ids", &design_ids);
  m.def("covariate_design", &covariate_design, "design"_a, "n"_a, "seed"_a);
  m.def("normalize_config",
        [](const std::string& text, const std::vector<std::string>& overrides) {
          return to_config_text(parse_config_text(text, overrides));
        },
        "text"_a, "overrides"_a = std::vector<std::string>{},
        "Parses an experiment file and returns the full effective configuration.");
  m.def("simulate_null",
        [](const std::string& text, const std::string& design, int workers) {
          const ExperimentConfig c = parse_config_text(text);
          SimulationRun run;
          {
            py::gil_scoped_release release;
            run = simulate_null(c, design, workers);
          }
          return run_dict(run);
        },
        "config"_a, "design"_a, "workers"_a = 1);
  m.def("simulate_power",
        [](const std::string& text, const std::string& design, int workers) {
          const ExperimentConfig c = parse_config_text(text);
          PowerResult r;
          {
            py::gil_scoped_release release;
            r = simulate_power(c, design, workers);
          }
          return py::dict("null"_a = run_dict(r.null_run),
                          "alternative"_a = run_dict(r.alternative_run),
                          "critical_value"_a = r.critical_value_at,
                          "rejection_rate"_a = r.rejection_rate_at,
                          "raw_critical_value"_a = r.raw_critical_value_at,
                          "raw_rejection_rate"_a = r.raw_rejection_rate_at);
        },
        "config"_a, "design"_a, "workers"_a = 1);
}
