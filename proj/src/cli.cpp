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

#include "dfreg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "dfreg/basis.hpp"
#include "dfreg/config.hpp"
#include "dfreg/error.hpp"
#include "dfreg/harness.hpp"
#include "dfreg/io.hpp"
#include "dfreg/pipeline.hpp"
#include "dfreg/rng.hpp"

namespace dfreg::cli {
namespace {

namespace fs = std::filesystem;

constexpr double kExactFitTolerance = 1e-10;

struct Common {
  std::string output_dir = "dfreg_out";
  int workers = 1;
  std::string delimiter = ",";
  std::vector<std::string> sets;
};

// Files are assembled in memory and only written once the command succeeded.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string name, std::string content) {
    files.emplace_back(std::move(name), std::move(content));
  }
};

char parse_delimiter(const std::string& d) {
  if (d == "tab" || d == "\\t" || d == "\t") return '\t';
  if (d == "space") return ' ';
  if (d.size() != 1) throw ConfigError("delimiter: expected one character, got '" + d + "'");
  return d[0];
}

std::string fmt(double x) { return format_double(x); }

std::string join_doubles(const Vector& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

std::string join_doubles(const std::vector<double>& v) {
  return join_doubles(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
}

std::string statistic_label(StatisticKind kind) {
  if (kind == StatisticKind::kCvm) return "cvm (discrete surrogate, not part of the original test)";
  return to_string(kind);
}

void write_outputs(const Common& common, const Outputs& outputs) {
  const fs::path dir(common.output_dir);
  fs::create_directories(dir);
  for (const auto& [name, content] : outputs.files) write_file_atomic(dir / name, content);
}

std::string run_comment(const std::string& command, const Common& common,
                        const std::string& config_path) {
  std::ostringstream os;
  os << "; command = " << command << "\n";
  if (!config_path.empty()) os << "; config_path = " << config_path << "\n";
  os << "; output_dir = " << common.output_dir << "\n";
  for (const auto& s : common.sets) os << "; override = " << s << "\n";
  return os.str();
}

std::size_t count_at_least(const Ecdf& ecdf, double x) {
  const auto& v = ecdf.sorted_values();
  return static_cast<std::size_t>(v.end() - std::lower_bound(v.begin(), v.end(), x));
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string data;
  std::string model = "simple_linear";
  std::vector<double> theta0;
  int max_iter = 100;
};

Vector start_point(const RegressionModel& model, const std::vector<double>& theta0) {
  if (theta0.empty()) return Vector::Ones(model.dim());
  if (static_cast<int>(theta0.size()) != model.dim()) {
    throw ConfigError("theta0: model '" + model.name() + "' has " +
                      std::to_string(model.dim()) + " parameters");
  }
  return Eigen::Map<const Vector>(theta0.data(), static_cast<Index>(theta0.size()));
}

int cmd_fit(const FitArgs& args, const Common& common, std::ostream& out, std::ostream& err) {
  const char delim = parse_delimiter(common.delimiter);
  const Sample sample = read_sample(args.data, delim);
  const RegressionModel model = make_model(args.model);
  GaussNewtonOptions gn;
  gn.max_iter = args.max_iter;
  const FitResult f = fit(model, sample, start_point(model, args.theta0), gn);
  const Vector fitted = model.mean(f.theta_hat, sample.covariates);

  Outputs o;
  std::string theta = std::string("index") + delim + "theta\n";
  for (Index k = 0; k < f.theta_hat.size(); ++k) {
    theta += std::to_string(k) + delim + fmt(f.theta_hat[k]) + "\n";
  }
  o.add("theta.csv", theta);
  std::string resid = std::string("row") + delim + "fitted" + delim + "residual\n";
  for (Index i = 0; i < sample.covariates.rows(); ++i) {
    resid += std::to_string(i + 1) + delim + fmt(fitted[i]) + delim + fmt(f.residuals[i]) + "\n";
  }
  o.add("residuals.csv", resid);

  std::ostringstream s;
  s << "[fit]\nmodel = " << model.name() << "\nn = " << sample.covariates.rows() << "\np = " << sample.covariates.cols()
    << "\ntheta_hat = " << join_doubles(f.theta_hat) << "\nsse = " << fmt(f.residuals.squaredNorm())
    << "\nconverged = " << (f.converged ? "true" : "false") << "\niterations = " << f.iterations
    << "\n";
  o.add("summary.txt", s.str());
  std::ostringstream m;
  m << run_comment("fit", common, "") << "[run]\ndata = " << args.data << "\nmodel = " << args.model
    << "\nmax_iter = " << args.max_iter << "\n";
  if (!args.theta0.empty()) m << "theta0 = " << join_doubles(args.theta0) << "\n";
  o.add("manifest.ini", m.str());
  write_outputs(common, o);

  out << "theta_hat = " << join_doubles(f.theta_hat) << "\n";
  if (!f.converged) {
    err << "error: Gauss-Newton did not converge in " << args.max_iter << " iterations\n";
    return kExitNumerical;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- test

struct TestArgs {
  std::string data;
  std::string model = "simple_linear";
  std::optional<std::uint64_t> seed;
  Index null_reps = 999;
  std::string statistic = "ks_abs";
  std::string anchors = "halton";
  std::string errors = "normal";
  int grid_resolution = 0;
  bool studentize = false;
  std::vector<double> theta0;
};

int cmd_test(const TestArgs& args, const Common& common, std::ostream& out, std::ostream& err) {
  if (!args.seed) throw ConfigError("seed: --seed is required for the null simulation");
  if (args.null_reps < 1) throw ConfigError("null-reps: must be >= 1");
  const char delim = parse_delimiter(common.delimiter);
  const Sample sample = read_sample(args.data, delim);
  const RegressionModel model = make_model(args.model);
  const Index n = sample.covariates.rows();
  const int p = static_cast<int>(sample.covariates.cols());

  ExperimentConfig c;
  c.model = args.model;
  c.n = n;
  c.reps = args.null_reps;
  c.seed = *args.seed;
  c.statistic = statistic_from_string(args.statistic);
  c.anchors = anchor_mode_from_string(args.anchors);
  c.errors = error_law_from_string(args.errors);
  c.grid_resolution = args.grid_resolution;
  c.studentize = args.studentize;

  const ReferenceBasis basis = make_basis(p, model.dim());
  std::optional<AnchorSet> anchors;
  if (p >= 2) {
    anchors = generate_anchors(n, p, c.anchors, derive_seed(fixed_design_seed(c), "anchors"));
  }
  AnalysisOptions opts;
  opts.grid.resolution = c.grid_resolution;
  opts.transform.studentize = c.studentize;
  opts.theta0 = start_point(model, args.theta0);
  opts.exact_fit_tolerance = kExactFitTolerance;
  const Analysis a = analyze(sample, model, basis, anchors ? &*anchors : nullptr, opts);
  if (!a.fit.converged) throw SingularityError("fit: Gauss-Newton did not converge");

  const double dof = static_cast<double>(n - model.dim());
  const double sigma_hat = std::sqrt(a.fit.residuals.squaredNorm() / dof);
  c.theta.assign(a.fit.theta_hat.data(), a.fit.theta_hat.data() + a.fit.theta_hat.size());
  c.error_scale = c.studentize ? 1.0 : sigma_hat;
  const SimulationRun null = simulate_null_fixed(c, sample.covariates, common.workers);

  const StatisticResult obs = compute_statistic(a.transformed_process, c.statistic);
  const StatisticResult raw_obs = compute_statistic(a.raw_process, c.statistic);
  const double reps = static_cast<double>(null.transformed.size());
  const double p_value =
      (1.0 + static_cast<double>(count_at_least(null.transformed, obs.value))) / (1.0 + reps);
  const double raw_p_value =
      (1.0 + static_cast<double>(count_at_least(null.raw, raw_obs.value))) / (1.0 + reps);

  Outputs o;
  std::string stats = std::string("process") + delim + "statistic" + delim + "value" + delim +
                      "p_value\n";
  const auto add_stats = [&](const std::string& name, const StepProcess& proc, double pv) {
    for (const auto& r : ks_statistics(proc)) {
      stats += name + delim + to_string(r.name) + delim + fmt(r.value) + delim +
               (r.name == c.statistic ? fmt(pv) : std::string()) + "\n";
    }
  };
  add_stats("transformed", a.transformed_process, p_value);
  add_stats("raw", a.raw_process, raw_p_value);
  o.add("statistics.csv", stats);

  std::string resid = std::string("scan_index") + delim + "row" + delim + "residual" + delim +
                      "transformed_residual\n";
  for (Index j = 0; j < n; ++j) {
    resid += std::to_string(j + 1) + delim + std::to_string(a.order[j] + 1) + delim +
             fmt(a.raw_residuals[j]) + delim + fmt(a.transformed.e_hat[j]) + "\n";
  }
  o.add("residuals.csv", resid);
  o.add("process_transformed.csv", process_to_text(a.transformed_process, delim));
  o.add("process_raw.csv", process_to_text(a.raw_process, delim));
  o.add("null_ecdf.csv", ecdf_to_text(null.transformed, delim));
  o.add("null_ecdf_raw.csv", ecdf_to_text(null.raw, delim));

  std::ostringstream s;
  s << "[test]\nmodel = " << model.name() << "\nbasis = " << basis.describe() << "\nn = " << n
    << "\np = " << p << "\nstatistic = " << statistic_label(c.statistic)
    << "\nobserved = " << fmt(obs.value) << "\np_value = " << fmt(p_value)
    << "\nargmax = " << join_doubles(obs.argmax) << "\nraw_observed = " << fmt(raw_obs.value)
    << "\nraw_p_value = " << fmt(raw_p_value) << "\n";
  s << "\n[null]\nreps = " << null.attempted << "\nfailures = " << null.failures
    << "\nerrors = " << to_string(c.errors) << "\nerror_scale = " << fmt(c.error_scale)
    << "\nelapsed_seconds = " << fmt(null.elapsed_seconds) << "\n";
  s << "\n[fit]\ntheta_hat = " << join_doubles(a.fit.theta_hat) << "\nsigma_hat = "
    << fmt(sigma_hat) << "\niterations = " << a.fit.iterations << "\n";
  if (p >= 2) {
    s << "\n[transport]\nanchors = " << to_string(c.anchors)
      << "\ngrid_resolution = " << a.transformed_process.grid_resolution()
      << "\nrescale_lower = " << join_doubles(a.scaling->lower)
      << "\nrescale_upper = " << join_doubles(a.scaling->upper)
      << "\ntotal_cost = " << fmt(a.assignment->cost) << "\n";
  }
  o.add("summary.txt", s.str());

  std::ostringstream m;
  m << run_comment("test", common, "") << "[run]\ndata = " << args.data
    << "\nmodel = " << args.model << "\nseed = " << c.seed << "\nnull_reps = " << c.reps
    << "\nstatistic = " << to_string(c.statistic) << "\nanchors = " << to_string(c.anchors)
    << "\nerrors = " << to_string(c.errors) << "\ngrid_resolution = " << c.grid_resolution
    << "\nstudentize = " << (c.studentize ? "true" : "false") << "\n";
  o.add("manifest.ini", m.str());
  write_outputs(common, o);

  out << to_string(c.statistic) << " = " << fmt(obs.value) << "\np_value = " << fmt(p_value)
      << "\n";
  (void)err;
  return kExitOk;
}

// ------------------------------------------------------ simulate / power

struct SimArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<Index> reps;
  std::optional<Index> n;
  std::optional<Index> null_reps;
  bool plot_data = false;
  bool raw = false;
};

ExperimentConfig load_config(const SimArgs& args, Common& common) {
  std::vector<std::string> overrides = common.sets;
  if (args.seed) overrides.push_back("seed=" + std::to_string(*args.seed));
  if (args.reps) overrides.push_back("reps=" + std::to_string(*args.reps));
  if (args.n) overrides.push_back("n=" + std::to_string(*args.n));
  if (args.null_reps) overrides.push_back("null_reps=" + std::to_string(*args.null_reps));
  common.sets = overrides;
  return parse_config(args.config, overrides);
}

// The transformed statistic converges to sup |Brownian bridge| exactly when
// p = 1, d = 1 and the statistic is ks_abs.
bool kolmogorov_limit(const ExperimentConfig& c, const std::string& design) {
  return c.statistic == StatisticKind::kKsAbs && design_dimension(design) == 1 &&
         make_model(c.model).dim() == 1;
}

std::string plot_text(const Ecdf& ecdf, char delim) {
  std::string s = std::string("x") + delim + "kolmogorov_cdf" + delim + "ecdf\n";
  for (int i = 0; i <= 300; ++i) {
    const double x = i / 100.0;
    s += fmt(x) + delim + fmt(kolmogorov_cdf(x)) + delim + fmt(ecdf(x)) + "\n";
  }
  return s;
}

int cmd_simulate(const SimArgs& args, Common common, std::ostream& out) {
  const char delim = parse_delimiter(common.delimiter);
  const ExperimentConfig config = load_config(args, common);
  std::vector<SimulationRun> runs;
  for (const auto& d : config.designs) runs.push_back(simulate_null(config, d, common.workers));

  Outputs o;
  std::ostringstream s;
  s << "[run]\ncommand = simulate\nmodel = " << config.model
    << "\nstatistic = " << statistic_label(config.statistic) << "\nbasis = "
    << runs.front().basis_description << "\nreps = " << config.reps << "\nn = " << config.n
    << "\n";
  for (const auto& run : runs) {
    o.add("ecdf_" + run.design + ".csv", ecdf_to_text(run.transformed, delim));
    if (args.raw) o.add("ecdf_raw_" + run.design + ".csv", ecdf_to_text(run.raw, delim));
    if (args.plot_data) {
      o.add("plot_" + run.design + ".csv", plot_text(run.transformed, delim));
      if (args.raw) o.add("plot_raw_" + run.design + ".csv", plot_text(run.raw, delim));
    }
    s << "\n[design " << run.design << "]\nbasis = " << run.basis_description
      << "\nattempted = " << run.attempted << "\nfailures = " << run.failures
      << "\nelapsed_seconds = " << fmt(run.elapsed_seconds) << "\n";
    if (kolmogorov_limit(config, run.design)) {
      s << "kolmogorov_distance = "
        << fmt(ecdf_sup_distance(run.transformed, kolmogorov_cdf)) << "\n";
    }
    out << run.design << ": " << run.transformed.size() << " replications, "
        << run.failures << " failures\n";
  }
  if (runs.size() > 1) {
    s << "\n[distances]\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      for (std::size_t j = i + 1; j < runs.size(); ++j) {
        const std::string key = runs[i].design + "." + runs[j].design;
        s << "transformed." << key << " = "
          << fmt(ecdf_sup_distance(runs[i].transformed, runs[j].transformed)) << "\n";
        s << "raw." << key << " = " << fmt(ecdf_sup_distance(runs[i].raw, runs[j].raw)) << "\n";
      }
    }
  }
  o.add("summary.txt", s.str());
  o.add("manifest.ini", run_comment("simulate", common, args.config) + to_config_text(config));
  write_outputs(common, o);
  return kExitOk;
}

int cmd_power(const SimArgs& args, Common common, std::ostream& out) {
  const char delim = parse_delimiter(common.delimiter);
  const ExperimentConfig config = load_config(args, common);
  if (!config.alternative) throw ConfigError("psi: power needs an [alternative] section");

  Outputs o;
  std::ostringstream s;
  s << "[run]\ncommand = power\nmodel = " << config.model
    << "\nstatistic = " << statistic_label(config.statistic) << "\npsi = "
    << config.alternative->psi << "\namplitude = " << fmt(config.alternative->amplitude)
    << "\nlocal_scaling = " << (config.alternative->local_scaling ? "true" : "false") << "\n";
  std::string table = std::string("design") + delim + "level" + delim + "critical_value" +
                      delim + "rejection_rate" + delim + "raw_critical_value" + delim +
                      "raw_rejection_rate\n";
  for (const auto& d : config.designs) {
    const PowerResult r = simulate_power(config, d, common.workers);
    o.add("ecdf_null_" + d + ".csv", ecdf_to_text(r.null_run.transformed, delim));
    o.add("ecdf_alt_" + d + ".csv", ecdf_to_text(r.alternative_run.transformed, delim));
    if (args.raw) {
      o.add("ecdf_null_raw_" + d + ".csv", ecdf_to_text(r.null_run.raw, delim));
      o.add("ecdf_alt_raw_" + d + ".csv", ecdf_to_text(r.alternative_run.raw, delim));
    }
    for (double level : config.levels) {
      table += d + delim + fmt(level) + delim + fmt(r.critical_value_at.at(level)) + delim +
               fmt(r.rejection_rate_at.at(level)) + delim +
               fmt(r.raw_critical_value_at.at(level)) + delim +
               fmt(r.raw_rejection_rate_at.at(level)) + "\n";
      out << d << " level " << fmt(level) << ": rejection rate "
          << fmt(r.rejection_rate_at.at(level)) << " (raw " << fmt(r.raw_rejection_rate_at.at(level))
          << ")\n";
    }
    s << "\n[design " << d << "]\nbasis = " << r.null_run.basis_description
      << "\nnull_attempted = " << r.null_run.attempted
      << "\nnull_failures = " << r.null_run.failures
      << "\nalternative_attempted = " << r.alternative_run.attempted
      << "\nalternative_failures = " << r.alternative_run.failures
      << "\nelapsed_seconds = "
      << fmt(r.null_run.elapsed_seconds + r.alternative_run.elapsed_seconds)
      << "\nnull_alternative_distance = "
      << fmt(ecdf_sup_distance(r.null_run.transformed, r.alternative_run.transformed))
      << "\nraw_null_alternative_distance = "
      << fmt(ecdf_sup_distance(r.null_run.raw, r.alternative_run.raw)) << "\n";
  }
  o.add("rejection.csv", table);
  o.add("summary.txt", s.str());
  o.add("manifest.ini", run_comment("power", common, args.config) + to_config_text(config));
  write_outputs(common, o);
  return kExitOk;
}

// ---------------------------------------------------------------- assign

struct AssignArgs {
  std::string data;
  std::string anchors = "halton";
  std::optional<std::uint64_t> seed;
  bool no_rescale = false;
};

int cmd_assign(const AssignArgs& args, const Common& common, std::ostream& out) {
  const char delim = parse_delimiter(common.delimiter);
  const NumericTable table = read_table(args.data, delim);
  if (table.values.rows() < 1 || table.values.cols() < 1) {
    throw DimensionError(args.data + ": no covariate rows");
  }
  const AnchorMode mode = anchor_mode_from_string(args.anchors);
  if (mode == AnchorMode::kRandom && !args.seed) {
    throw ConfigError("seed: random anchors need --seed");
  }
  const Index n = table.values.rows();
  const int p = static_cast<int>(table.values.cols());

  std::optional<UnitCubeScaling> scaling;
  if (!args.no_rescale) scaling = rescale_to_unit_cube(table.values);
  const Matrix& x = scaling ? scaling->scaled : table.values;
  const AnchorSet anchors =
      generate_anchors(n, p, mode, args.seed ? derive_seed(*args.seed, "anchors") : 0);
  const Assignment a = solve_assignment(x, anchors);

  Outputs o;
  std::string pairs = std::string("i") + delim + "sigma" + delim + "cost\n";
  for (Index i = 0; i < n; ++i) {
    pairs += std::to_string(i + 1) + delim + std::to_string(a.sigma[i] + 1) + delim +
             fmt(a.pair_costs[i]) + "\n";
  }
  o.add("pairs.csv", pairs);
  std::string anchor_text = "anchor";
  for (int j = 0; j < p; ++j) anchor_text += delim + ("x" + std::to_string(j + 1));
  anchor_text += "\n";
  for (Index k = 0; k < n; ++k) {
    anchor_text += std::to_string(k + 1);
    for (int j = 0; j < p; ++j) anchor_text += delim + fmt(anchors.points(k, j));
    anchor_text += "\n";
  }
  o.add("anchors.csv", anchor_text);

  std::ostringstream s;
  s << "[assign]\nn = " << n << "\np = " << p << "\nanchors = " << to_string(mode)
    << "\nrescaled = " << (scaling ? "true" : "false") << "\n";
  if (scaling) {
    s << "rescale_lower = " << join_doubles(scaling->lower)
      << "\nrescale_upper = " << join_doubles(scaling->upper) << "\n";
  }
  s << "total_cost = " << fmt(a.cost) << "\n";
  o.add("summary.txt", s.str());
  std::ostringstream m;
  m << run_comment("assign", common, "") << "[run]\ndata = " << args.data
    << "\nanchors = " << to_string(mode) << "\nrescale = " << (scaling ? "true" : "false")
    << "\n";
  if (args.seed) m << "seed = " << *args.seed << "\n";
  o.add("manifest.ini", m.str());
  write_outputs(common, o);

  out << "total_cost = " << fmt(a.cost) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- limits

struct LimitArgs {
  int p = 1;
  int d = 1;
  int grid = 0;
  double x_max = 3.0;
  double x_step = 0.01;
};

int cmd_limits(const LimitArgs& args, const Common& common, std::ostream& out) {
  const char delim = parse_delimiter(common.delimiter);
  if (!(args.x_max > 0.0 && args.x_step > 0.0)) {
    throw ConfigError("x-max, x-step: must be positive");
  }
  const ReferenceBasis basis = make_basis(args.p, args.d);
  const int m = args.grid > 0 ? args.grid : (args.p == 1 ? 10 : 4);
  if (std::pow(static_cast<double>(m), 2.0 * args.p) > 1e7) {
    throw ConfigError("grid: covariance table would exceed 1e7 rows");
  }

  Outputs o;
  std::string k = std::string("x") + delim + "kolmogorov_cdf\n";
  const int steps = static_cast<int>(std::floor(args.x_max / args.x_step + 1e-9));
  for (int i = 0; i <= steps; ++i) {
    const double x = i * args.x_step;
    k += fmt(x) + delim + fmt(kolmogorov_cdf(x)) + "\n";
  }
  o.add("kolmogorov.csv", k);

  // Grid points {1/m, ..., 1}^p in odometer order, first coordinate fastest.
  std::vector<Vector> points;
  std::vector<int> idx(static_cast<std::size_t>(args.p), 1);
  while (true) {
    Vector v(args.p);
    for (int j = 0; j < args.p; ++j) v[j] = static_cast<double>(idx[j]) / m;
    points.push_back(v);
    int j = 0;
    while (j < args.p && idx[j] == m) idx[j++] = 1;
    if (j == args.p) break;
    ++idx[j];
  }
  std::string cov;
  for (int j = 0; j < args.p; ++j) cov += "x" + std::to_string(j + 1) + delim;
  for (int j = 0; j < args.p; ++j) cov += "y" + std::to_string(j + 1) + delim;
  cov += "covariance\n";
  for (const auto& x : points) {
    for (const auto& y : points) {
      for (int j = 0; j < args.p; ++j) cov += fmt(x[j]) + delim;
      for (int j = 0; j < args.p; ++j) cov += fmt(y[j]) + delim;
      cov += fmt(limit_covariance(x, y, basis)) + "\n";
    }
  }
  o.add("covariance.csv", cov);

  std::ostringstream s;
  s << "[limits]\nbasis = " << basis.describe() << "\ngrid = " << m << "\nx_max = "
    << fmt(args.x_max) << "\nx_step = " << fmt(args.x_step) << "\n";
  o.add("summary.txt", s.str());
  std::ostringstream man;
  man << run_comment("limits", common, "") << "[run]\np = " << args.p << "\nd = " << args.d
      << "\ngrid = " << m << "\nx_max = " << fmt(args.x_max) << "\nx_step = " << fmt(args.x_step)
      << "\n";
  o.add("manifest.ini", man.str());
  write_outputs(common, o);
  out << "basis = " << basis.describe() << "\n";
  return kExitOk;
}

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--output-dir,-o", common.output_dir, "Directory for all outputs")
      ->envname("DFREG_OUTPUT_DIR");
  cmd->add_option("--workers,-j", common.workers, "Concurrent replications")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--delimiter", common.delimiter, "Field delimiter (one character or 'tab')");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distribution-free residual tests for parametric regression", "dfreg"};
  app.require_subcommand(1);
  Common common;

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a regression model to a data file");
  fit_cmd->add_option("--data", fit_args.data, "Covariate columns then the response")
      ->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--model", fit_args.model, "Model id");
  fit_cmd->add_option("--theta0", fit_args.theta0, "Gauss-Newton start")->delimiter(',');
  fit_cmd->add_option("--max-iter", fit_args.max_iter, "Gauss-Newton iteration cap")
      ->check(CLI::NonNegativeNumber);
  add_common(fit_cmd, common);

  TestArgs test_args;
  auto* test_cmd = app.add_subcommand("test", "Full test with a Monte Carlo p-value");
  test_cmd->add_option("--data", test_args.data, "Covariate columns then the response")
      ->required()->check(CLI::ExistingFile);
  test_cmd->add_option("--model", test_args.model, "Model id");
  test_cmd->add_option("--seed", test_args.seed, "Seed of the null simulation");
  test_cmd->add_option("--null-reps", test_args.null_reps, "Null replications");
  test_cmd->add_option("--statistic", test_args.statistic, "ks_abs, ks_plus or cvm");
  test_cmd->add_option("--anchors", test_args.anchors, "halton or random");
  test_cmd->add_option("--errors", test_args.errors, "Null error law: normal or uniform");
  test_cmd->add_option("--grid-resolution", test_args.grid_resolution, "Grid per axis, p >= 2");
  test_cmd->add_flag("--studentize", test_args.studentize, "Divide residuals by sigma_hat");
  test_cmd->add_option("--theta0", test_args.theta0, "Gauss-Newton start")->delimiter(',');
  add_common(test_cmd, common);

  SimArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Null distribution per design");
  SimArgs pow_args;
  auto* pow_cmd = app.add_subcommand("power", "Rejection rates under an alternative");
  for (auto [cmd, a] : {std::pair{sim_cmd, &sim_args}, std::pair{pow_cmd, &pow_args}}) {
    cmd->add_option("--config,-c", a->config, "Experiment file")
        ->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", a->seed, "Master seed (overrides the file)");
    cmd->add_option("--reps", a->reps, "Replications (overrides the file)");
    cmd->add_option("--n", a->n, "Sample size (overrides the file)");
    cmd->add_option("--set", common.sets, "section.key=value override")->take_all();
    cmd->add_flag("--raw", a->raw, "Also write statistics of the untransformed process");
    add_common(cmd, common);
  }
  sim_cmd->add_flag("--plot-data", sim_args.plot_data,
                    "Write x, Kolmogorov CDF and ECDF columns");
  pow_cmd->add_option("--null-reps", pow_args.null_reps, "Null replications");

  AssignArgs assign_args;
  auto* assign_cmd = app.add_subcommand("assign", "Optimal assignment to anchor points");
  assign_cmd->add_option("--data", assign_args.data, "Covariate columns")
      ->required()->check(CLI::ExistingFile);
  assign_cmd->add_option("--anchors", assign_args.anchors, "halton or random");
  assign_cmd->add_option("--seed", assign_args.seed, "Seed for random anchors");
  assign_cmd->add_flag("--no-rescale", assign_args.no_rescale,
                       "Use covariates as given instead of mapping them onto [0,1]^p");
  add_common(assign_cmd, common);

  LimitArgs limit_args;
  auto* limits_cmd = app.add_subcommand("limits", "Kolmogorov CDF and limit covariance tables");
  limits_cmd->add_option("--p", limit_args.p, "Covariate dimension")->check(CLI::Range(1, 6));
  limits_cmd->add_option("--d", limit_args.d, "Number of reference functions")
      ->check(CLI::PositiveNumber);
  limits_cmd->add_option("--grid", limit_args.grid, "Grid points per axis");
  limits_cmd->add_option("--x-max", limit_args.x_max, "Upper end of the Kolmogorov table");
  limits_cmd->add_option("--x-step", limit_args.x_step, "Step of the Kolmogorov table");
  add_common(limits_cmd, common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_args, common, out, err);
    if (*test_cmd) return cmd_test(test_args, common, out, err);
    if (*sim_cmd) return cmd_simulate(sim_args, common, out);
    if (*pow_cmd) return cmd_power(pow_args, common, out);
    if (*assign_cmd) return cmd_assign(assign_args, common, out);
    if (*limits_cmd) return cmd_limits(limit_args, common, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace dfreg::cli
