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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "dfreg/basis.hpp"
#include "dfreg/error.hpp"
#include "dfreg/pipeline.hpp"
#include "dfreg/rng.hpp"

namespace dfreg {
namespace {

// log of a Gamma(shape, 1) variate; stays finite for tiny shapes where the
// variate itself underflows (Gamma(a) = Gamma(a + 1) U^{1/a}).
double log_gamma_variate(double shape, Engine& engine) {
  shape = std::max(shape, 1e-12);
  if (shape >= 1.0) {
    std::gamma_distribution<double> g(shape, 1.0);
    return std::log(g(engine));
  }
  std::gamma_distribution<double> g(shape + 1.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = 1.0 - unif(engine);  // (0, 1]
  return std::log(g(engine)) + std::log(u) / shape;
}

double beta_variate(double a, double b, Engine& engine) {
  const double la = log_gamma_variate(a, engine);
  const double lb = log_gamma_variate(b, engine);
  return 1.0 / (1.0 + std::exp(lb - la));
}

struct Outcome {
  double transformed = 0.0;
  double raw = 0.0;
  bool ok = false;
};

template <typename Task>
void run_parallel(Index count, int workers, Task&& task) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::max<Index>(count, 1))));
  if (workers == 1) {
    for (Index i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (Index i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void parallel_for(Index count, int workers, const std::function<void(Index)>& task) {
  run_parallel(count, workers, task);
}

std::string to_string(ErrorLaw law) {
  return law == ErrorLaw::kNormal ? "normal" : "uniform";
}

ErrorLaw error_law_from_string(const std::string& name) {
  if (name == "normal") return ErrorLaw::kNormal;
  if (name == "uniform") return ErrorLaw::kUniform;
  throw DomainError("unknown error law '" + name + "' (expected normal|uniform)");
}

std::vector<std::string> model_ids() {
  return {"simple_linear", "centered_linear", "bilinear2d", "quadratic", "exp_growth"};
}

RegressionModel make_model(const std::string& id) {
  if (id == "simple_linear") return RegressionModel::simple_linear();
  if (id == "centered_linear") return RegressionModel::centered_linear();
  if (id == "bilinear2d") return RegressionModel::bilinear2d();
  if (id == "quadratic") {
    return RegressionModel::basis_linear(
        {[](const Vector&) { return 1.0; }, [](const Vector& x) { return x[0]; },
         [](const Vector& x) { return x[0] * x[0]; }},
        "quadratic", 1);
  }
  if (id == "exp_growth") {
    return RegressionModel::custom(
        2, [](const Vector& t, const Vector& x) { return t[0] * std::exp(t[1] * x[0]); },
        [](const Vector& t, const Vector& x) {
          const double e = std::exp(t[1] * x[0]);
          Vector g(2);
          g << e, t[0] * x[0] * e;
          return g;
        },
        "exp_growth", 1);
  }
  throw DomainError("unknown model '" + id + "'");
}

std::vector<std::string> design_ids() {
  return {"uniform_0_2", "normal_1_2", "beta_dep_a", "beta_dep_b", "beta_indep"};
}

int design_dimension(const std::string& id) {
  if (id == "uniform_0_2" || id == "normal_1_2") return 1;
  if (id == "beta_dep_a" || id == "beta_dep_b" || id == "beta_indep") return 2;
  throw DomainError("unknown design '" + id + "'");
}

Matrix covariate_design(const std::string& id, Index n, std::uint64_t seed) {
  const int p = design_dimension(id);
  if (n < 1) throw DomainError("covariate_design: n must be >= 1");
  Engine engine = make_engine(seed);
  Matrix x(n, p);
  if (id == "uniform_0_2") {
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    for (Index i = 0; i < n; ++i) x(i, 0) = unif(engine);
  } else if (id == "normal_1_2") {
    std::normal_distribution<double> normal(1.0, std::numbers::sqrt2);
    for (Index i = 0; i < n; ++i) x(i, 0) = normal(engine);
  } else if (id == "beta_dep_a" || id == "beta_dep_b") {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const bool flip = id == "beta_dep_b";
    for (Index i = 0; i < n; ++i) {
      const double x1 = unif(engine);
      const double a = 8.0 * (flip ? x1 : 1.0 - x1);
      const double b = 8.0 * (flip ? 1.0 - x1 : x1);
      x(i, 0) = x1;
      x(i, 1) = beta_variate(a, b, engine);
    }
  } else {  // beta_indep
    for (Index i = 0; i < n; ++i) {
      x(i, 0) = beta_variate(0.35, 0.35, engine);
      x(i, 1) = beta_variate(0.2, 0.2, engine);
    }
  }
  return x;
}

std::vector<std::string> psi_ids() {
  return {"x_squared", "x2_squared", "x2_cubed", "sin_half_pi_x2"};
}

std::function<double(const Vector&)> psi_function(const std::string& id) {
  if (id == "x_squared") return [](const Vector& x) { return x[0] * x[0]; };
  const auto second = [id](const Vector& x) {
    if (x.size() < 2) throw DimensionError("psi '" + id + "' needs p >= 2");
    return x[1];
  };
  if (id == "x2_squared") return [second](const Vector& x) { return std::pow(second(x), 2); };
  if (id == "x2_cubed") return [second](const Vector& x) { return std::pow(second(x), 3); };
  if (id == "sin_half_pi_x2") {
    return [second](const Vector& x) { return std::sin(std::numbers::pi * second(x) / 2.0); };
  }
  throw DomainError("unknown psi '" + id + "'");
}

void validate(const ExperimentConfig& c) {
  const auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (c.designs.empty()) fail("design: at least one design is required");
  RegressionModel model = [&] {
    try {
      return make_model(c.model);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("model: ") + e.what());
    }
  }();
  for (const auto& d : c.designs) {
    int p = 0;
    try {
      p = design_dimension(d);
    } catch (const DomainError& e) {
      fail(std::string("design: ") + e.what());
    }
    if (model.covariate_dim() && *model.covariate_dim() != p) {
      fail("design '" + d + "' has p = " + std::to_string(p) + " but model '" + c.model +
           "' needs p = " + std::to_string(*model.covariate_dim()));
    }
  }
  if (c.n < 10) fail("n: must be >= 10");
  if (c.reps < 1) fail("reps: must be >= 1");
  if (c.null_reps < 0) fail("null_reps: must be >= 0");
  if (!c.theta.empty() && static_cast<int>(c.theta.size()) != model.dim()) {
    fail("theta: expected " + std::to_string(model.dim()) + " values");
  }
  for (double t : c.theta) {
    if (!std::isfinite(t)) fail("theta: values must be finite");
  }
  if (c.alternative) {
    try {
      psi_function(c.alternative->psi);
    } catch (const DomainError& e) {
      fail(std::string("psi: ") + e.what());
    }
    if (!std::isfinite(c.alternative->amplitude)) fail("amplitude: must be finite");
  }
  for (double level : c.levels) {
    if (!(level > 0.0 && level < 1.0)) fail("levels: each level must be in (0, 1)");
  }
  if (c.grid_resolution < 0) fail("grid_resolution: must be >= 0");
  if (!(std::isfinite(c.error_scale) && c.error_scale >= 0.0)) {
    fail("error_scale: must be finite and >= 0");
  }
}

Ecdf Ecdf::from_values(std::vector<double> values) {
  Ecdf e;
  e.sorted_ = std::move(values);
  std::sort(e.sorted_.begin(), e.sorted_.end());
  return e;
}

double Ecdf::operator()(double x) const {
  if (sorted_.empty()) return 0.0;
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double Ecdf::critical_value(double level) const {
  if (sorted_.empty()) throw DomainError("Ecdf::critical_value: empty ECDF");
  const double r = static_cast<double>(sorted_.size());
  auto k = static_cast<std::size_t>(std::ceil((1.0 - level) * r - 1e-9));
  k = std::clamp<std::size_t>(k, 1, sorted_.size());
  return sorted_[k - 1];
}

double Ecdf::exceedance(double critical) const {
  return 1.0 - (*this)(critical);
}

double ecdf_sup_distance(const Ecdf& a, const Ecdf& b) {
  if (a.empty() || b.empty()) throw DomainError("ecdf_sup_distance: empty ECDF");
  const auto& x = a.sorted_values();
  const auto& y = b.sorted_values();
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < x.size() || j < y.size()) {
    double v;
    if (j == y.size() || (i < x.size() && x[i] <= y[j])) {
      v = x[i];
    } else {
      v = y[j];
    }
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

double ecdf_sup_distance(const Ecdf& a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw DomainError("ecdf_sup_distance: empty ECDF");
  const auto& x = a.sorted_values();
  const double n = static_cast<double>(x.size());
  double best = 0.0;
  std::size_t i = 0;
  while (i < x.size()) {
    const double v = x[i];
    const double before = static_cast<double>(i) / n;
    while (i < x.size() && x[i] == v) ++i;
    const double after = static_cast<double>(i) / n;
    const double f = cdf(v);
    best = std::max({best, std::abs(after - f), std::abs(before - f)});
  }
  return best;
}

std::uint64_t design_seed(const ExperimentConfig& config, const std::string& design) {
  return derive_seed(config.seed, "design:" + design);
}

std::uint64_t power_seed(const ExperimentConfig& config, const std::string& design) {
  return derive_seed(config.seed, "power:" + design);
}

SimulationRun run_replications(const ExperimentConfig& config,
                               const CovariateSource& covariates, std::uint64_t seed,
                               Index reps, bool apply_alternative, int workers) {
  const auto start = std::chrono::steady_clock::now();
  const RegressionModel model = make_model(config.model);
  const Index n = config.n;
  Vector theta = Vector::Ones(model.dim());
  if (!config.theta.empty()) {
    theta = Eigen::Map<const Vector>(config.theta.data(),
                                     static_cast<Index>(config.theta.size()));
  }

  // Probe one draw for the covariate dimension.
  const int p = static_cast<int>(covariates(derive_seed(seed, "covariates", 0)).cols());
  const ReferenceBasis basis = make_basis(p, model.dim());
  std::optional<OrthonormalSet> grid_r;
  if (p == 1) grid_r = sample_on_points(basis, uniform_grid(n));
  std::optional<AnchorSet> fixed_anchors;
  if (p >= 2 && !config.resample_anchors) {
    fixed_anchors = generate_anchors(n, p, config.anchors, derive_seed(seed, "anchors"));
  }

  std::function<double(const Vector&)> psi;
  double amplitude = 0.0;
  if (apply_alternative && config.alternative) {
    psi = psi_function(config.alternative->psi);
    amplitude = config.alternative->amplitude;
    if (config.alternative->local_scaling) amplitude /= std::sqrt(static_cast<double>(n));
  }

  AnalysisOptions opts;
  opts.grid.resolution = config.grid_resolution;
  opts.transform.studentize = config.studentize;
  opts.theta0 = theta;

  std::vector<Outcome> outcomes(static_cast<std::size_t>(reps));
  run_parallel(reps, workers, [&](Index rep) {
    const auto r = static_cast<std::uint64_t>(rep);
    Matrix x = covariates(derive_seed(seed, "covariates", r));
    if (x.rows() != n) throw DimensionError("covariate source returned wrong n");

    Engine engine = make_engine(derive_seed(seed, "errors", r));
    Vector eps(n);
    if (config.errors == ErrorLaw::kNormal) {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Index i = 0; i < n; ++i) eps[i] = normal(engine);
    } else {
      const double h = std::sqrt(3.0);
      std::uniform_real_distribution<double> unif(-h, h);
      for (Index i = 0; i < n; ++i) eps[i] = unif(engine);
    }
    eps *= config.error_scale;

    Outcome out;
    try {
      Vector y = model.mean(theta, x) + eps;
      if (psi) {
        for (Index i = 0; i < n; ++i) y[i] += amplitude * psi(x.row(i).transpose());
      }
      const Sample sample = make_sample(std::move(x), std::move(y));
      std::optional<AnchorSet> own_anchors;
      const AnchorSet* anchors = nullptr;
      if (p >= 2) {
        if (fixed_anchors) {
          anchors = &*fixed_anchors;
        } else {
          own_anchors = generate_anchors(n, p, config.anchors, derive_seed(seed, "anchors", r));
          anchors = &*own_anchors;
        }
      }
      const Analysis a =
          analyze(sample, model, basis, anchors, opts, grid_r ? &*grid_r : nullptr);
      if (a.fit.converged) {
        out.transformed = compute_statistic(a.transformed_process, config.statistic).value;
        out.raw = compute_statistic(a.raw_process, config.statistic).value;
        out.ok = true;
      }
    } catch (const Error&) {
      out.ok = false;
    }
    outcomes[static_cast<std::size_t>(rep)] = out;
  });

  SimulationRun run;
  run.seed = seed;
  run.attempted = reps;
  run.basis_description = basis.describe();
  std::vector<double> transformed;
  std::vector<double> raw;
  transformed.reserve(outcomes.size());
  raw.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    if (!o.ok) {
      ++run.failures;
      continue;
    }
    transformed.push_back(o.transformed);
    raw.push_back(o.raw);
  }
  if (static_cast<double>(run.failures) > 0.01 * static_cast<double>(reps) ||
      transformed.empty()) {
    throw SimulationError("simulation: " + std::to_string(run.failures) + " of " +
                          std::to_string(reps) +
                          " replications failed to fit (limit is 1%)");
  }
  run.transformed = Ecdf::from_values(std::move(transformed));
  run.raw = Ecdf::from_values(std::move(raw));
  run.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

SimulationRun simulate_null(const ExperimentConfig& config, const std::string& design,
                            int workers) {
  validate(config);
  const Index n = config.n;
  SimulationRun run = run_replications(
      config, [&](std::uint64_t s) { return covariate_design(design, n, s); },
      design_seed(config, design), config.reps, false, workers);
  run.design = design;
  return run;
}

std::uint64_t fixed_design_seed(const ExperimentConfig& config) {
  return derive_seed(config.seed, "fixed-design");
}

SimulationRun simulate_null_fixed(const ExperimentConfig& config, const Matrix& covariates,
                                  int workers) {
  ExperimentConfig c = config;
  c.n = covariates.rows();
  c.alternative.reset();
  SimulationRun run = run_replications(
      c, [&](std::uint64_t) { return covariates; }, fixed_design_seed(config),
      c.reps, false, workers);
  run.design = "fixed";
  return run;
}

PowerResult simulate_power(const ExperimentConfig& config, const std::string& design,
                           int workers) {
  validate(config);
  if (!config.alternative) throw ConfigError("power: an [alternative] section is required");
  const Index n = config.n;
  const CovariateSource source = [&](std::uint64_t s) {
    return covariate_design(design, n, s);
  };
  PowerResult out;
  const Index null_reps = config.null_reps > 0 ? config.null_reps : config.reps;
  out.null_run = run_replications(config, source, design_seed(config, design), null_reps,
                                  false, workers);
  out.null_run.design = design;
  out.alternative_run =
      run_replications(config, source, power_seed(config, design), config.reps, true, workers);
  out.alternative_run.design = design;
  for (double level : config.levels) {
    const double crit = out.null_run.transformed.critical_value(level);
    const double raw_crit = out.null_run.raw.critical_value(level);
    out.critical_value_at[level] = crit;
    out.rejection_rate_at[level] = out.alternative_run.transformed.exceedance(crit);
    out.raw_critical_value_at[level] = raw_crit;
    out.raw_rejection_rate_at[level] = out.alternative_run.raw.exceedance(raw_crit);
  }
  return out;
}

}  // namespace dfreg
