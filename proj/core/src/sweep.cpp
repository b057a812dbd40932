#include "qplab/sweep.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "qplab/cocycle.hpp"
#include "qplab/dynamics.hpp"
#include "qplab/kicked_rotor.hpp"
#include "qplab/localization.hpp"
#include "qplab/model.hpp"
#include "qplab/parallel.hpp"
#include "qplab/spec_io.hpp"
#include "qplab/spectra.hpp"

namespace qplab {

namespace {

using nlohmann::json;

const std::set<std::string> kOperatorTasks = {"lyapunov", "spectrum", "localize", "evolve"};

bool is_kicked(const std::string& task) { return task == "kicked"; }

std::vector<std::string> axis_whitelist(const std::string& task) {
  if (is_kicked(task)) return {"kappa", "a", "b"};
  if (task == "lyapunov") return {"lambda", "omega", "theta", "energy"};
  return {"lambda", "omega", "theta"};
}

double axis_value(const SweepAxis& axis, int i) {
  if (axis.points == 1) return axis.lo;
  const double t = static_cast<double>(i) / (axis.points - 1);
  if (axis.log_scale) return axis.lo * std::pow(axis.hi / axis.lo, t);
  return axis.lo + (axis.hi - axis.lo) * t;
}

void set_frequency(OperatorSpec& spec, double omega) {
  spec.frequency = FrequencyVector::single(omega);
  switch (spec.orbit.kind()) {
    case OrbitKind::Shift:
      spec.orbit = OrbitGenerator::shift(spec.frequency);
      break;
    case OrbitKind::SkewShift:
      spec.orbit = OrbitGenerator::skew_shift(omega);
      break;
    case OrbitKind::MonomialPhase:
      throw std::invalid_argument("sweep: omega axis is undefined for monomial-phase orbits");
  }
}

void set_read_phase(OperatorSpec& spec, double theta) {
  const std::size_t slot = spec.orbit.kind() == OrbitKind::SkewShift ? 1 : 0;
  spec.phase[slot] = frac_unit(theta);
}

struct TaskKernel {
  std::vector<std::string> value_names;
  // fills record.values (same arity as value_names) and returns status
  std::function<std::string(const std::vector<std::pair<std::string, double>>&,
                            std::vector<double>&)>
      run;
};

TaskKernel make_kernel(const SweepConfig& config) {
  const json& opt = config.options;
  TaskKernel kernel;

  if (config.task == "lyapunov") {
    kernel.value_names = {"gamma", "stderr", "gamma_half"};
    const double energy0 = opt.value("energy", 0.0);
    const std::int64_t k = opt.value("k", std::int64_t{1000});
    const int grid = opt.value("theta_grid", 64);
    const OperatorSpec base = operator_spec_from_json(config.base);
    kernel.run = [=](const std::vector<std::pair<std::string, double>>& params,
                     std::vector<double>& values) {
      OperatorSpec spec = base;
      double energy = energy0;
      for (const auto& [name, v] : params) {
        if (name == "lambda") spec.coupling = v;
        else if (name == "omega") set_frequency(spec, v);
        else if (name == "theta") set_read_phase(spec, v);
        else if (name == "energy") energy = v;
      }
      const LyapunovEstimate est = lyapunov_theta_avg(spec, energy, k, grid);
      values = {est.gamma, est.stderr_, est.gamma_half};
      return "ok";
    };
    return kernel;
  }

  if (config.task == "spectrum") {
    kernel.value_names = {"count", "e_min", "e_max"};
    const int n = opt.value("n", 100);
    const bool periodic = opt.value("bc", std::string("dirichlet")) == "periodic";
    const OperatorSpec base = operator_spec_from_json(config.base);
    kernel.run = [=](const std::vector<std::pair<std::string, double>>& params,
                     std::vector<double>& values) {
      OperatorSpec spec = base;
      for (const auto& [name, v] : params) {
        if (name == "lambda") spec.coupling = v;
        else if (name == "omega") set_frequency(spec, v);
        else if (name == "theta") set_read_phase(spec, v);
      }
      const FiniteHamiltonian h = build_finite(
          spec, n, periodic ? BoundaryCondition::Periodic : BoundaryCondition::Dirichlet);
      const EigenSolution sol = eigs(h, /*want_vectors=*/false);
      const auto& ev = sol.spectrum.eigenvalues;
      values = {static_cast<double>(ev.size()), ev.front(), ev.back()};
      return "ok";
    };
    return kernel;
  }

  if (config.task == "localize") {
    kernel.value_names = {"fraction_localized", "mean_decay", "mean_ipr", "interior_count",
                          "localized_count"};
    const int n = opt.value("n", 300);
    const double e_lo = opt.value("e_lo", -std::numeric_limits<double>::infinity());
    const double e_hi = opt.value("e_hi", std::numeric_limits<double>::infinity());
    LocalizationOptions lopts;
    lopts.decay_threshold = opt.value("threshold", lopts.decay_threshold);
    lopts.r2_min = opt.value("r2_min", lopts.r2_min);
    lopts.interior_margin = opt.value("interior_margin", lopts.interior_margin);
    const OperatorSpec base = operator_spec_from_json(config.base);
    kernel.run = [=](const std::vector<std::pair<std::string, double>>& params,
                     std::vector<double>& values) {
      OperatorSpec spec = base;
      for (const auto& [name, v] : params) {
        if (name == "lambda") spec.coupling = v;
        else if (name == "omega") set_frequency(spec, v);
        else if (name == "theta") set_read_phase(spec, v);
      }
      const LocalizationReport report = localization_report(spec, n, e_lo, e_hi, lopts);
      values = {report.fraction_localized, report.mean_decay, report.mean_ipr,
                static_cast<double>(report.interior_count),
                static_cast<double>(report.localized_count)};
      return "ok";
    };
    return kernel;
  }

  if (config.task == "evolve") {
    kernel.value_names = {"beta", "x2_avg_final", "boundary_mass_max", "valid"};
    const int n = opt.value("n", 500);
    const double t_max = opt.value("t_max", 100.0);
    const int t_points = opt.value("t_points", 200);
    const double beta_lo = opt.value("beta_lo", t_max / 10.0);
    const double beta_hi = opt.value("beta_hi", t_max);
    const OperatorSpec base = operator_spec_from_json(config.base);
    kernel.run = [=](const std::vector<std::pair<std::string, double>>& params,
                     std::vector<double>& values) {
      OperatorSpec spec = base;
      for (const auto& [name, v] : params) {
        if (name == "lambda") spec.coupling = v;
        else if (name == "omega") set_frequency(spec, v);
        else if (name == "theta") set_read_phase(spec, v);
      }
      const EvolutionRun run = evolve(spec, n, {}, default_time_grid(t_max, t_points));
      const double nan = std::numeric_limits<double>::quiet_NaN();
      if (!run.valid) {
        values = {nan, nan, run.boundary_mass_max, 0.0};
        return "flagged";
      }
      const MomentSeries series = moments(run);
      const TransportFit fit = transport_exponent(series, beta_lo, beta_hi);
      values = {fit.beta, series.x2_avg.back(), run.boundary_mass_max, 1.0};
      return "ok";
    };
    return kernel;
  }

  if (config.task == "kicked") {
    kernel.value_names = {"n2_final", "saturation", "norm_drift", "valid_periods"};
    const int n = opt.value("n", 1024);
    const int periods = opt.value("periods", 300);
    const KickedRotorSpec base = rotor_spec_from_json(config.base);
    kernel.run = [=](const std::vector<std::pair<std::string, double>>& params,
                     std::vector<double>& values) {
      KickedRotorSpec spec = base;
      for (const auto& [name, v] : params) {
        if (name == "kappa") spec.kappa = v;
        else if (name == "a") spec.a = v;
        else if (name == "b") spec.b = v;
      }
      const RotorRun run = rotor_run(spec, n, periods);
      values = {run.n2.back(), run.saturation_metric, run.norm_drift_max,
                static_cast<double>(run.valid_periods)};
      return run.valid_periods == periods ? "ok" : "flagged";
    };
    return kernel;
  }

  throw std::invalid_argument("sweep: unknown task '" + config.task + "'");
}

}  // namespace

SweepConfig sweep_config_from_json(const json& j) {
  SweepConfig config;
  if (!j.contains("task")) throw std::invalid_argument("sweep config: missing 'task'");
  config.task = j.at("task").get<std::string>();
  if (config.task == "lyapunov-curve") config.task = "lyapunov";  // accepted alias
  if (!kOperatorTasks.count(config.task) && !is_kicked(config.task))
    throw std::invalid_argument("sweep config: unknown task '" + config.task + "'");

  const char* base_key = is_kicked(config.task) ? "rotor" : "operator";
  if (!j.contains(base_key))
    throw std::invalid_argument(std::string("sweep config: missing '") + base_key + "'");
  config.base = j.at(base_key);

  if (j.contains("axes")) {
    for (const auto& a : j.at("axes")) {
      SweepAxis axis;
      axis.name = a.at("name").get<std::string>();
      axis.lo = a.at("lo").get<double>();
      axis.hi = a.value("hi", axis.lo);
      axis.points = a.value("points", 1);
      axis.log_scale = a.value("scale", std::string("linear")) == "log";
      config.axes.push_back(std::move(axis));
    }
  }
  config.options = j.value("options", json::object());
  config.workers = j.value("workers", 1);
  config.seed = j.value("seed", 0u);
  config.budget = j.value("budget", std::size_t{100000});
  config.out_path = j.value("out", std::string{});
  config.format = j.value("format", std::string("csv"));
  return config;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open sweep config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("bad JSON in " + path + ": " + e.what());
  }
  return sweep_config_from_json(j);
}

json to_json(const SweepConfig& config) {
  json axes = json::array();
  for (const auto& a : config.axes)
    axes.push_back({{"name", a.name},
                    {"lo", a.lo},
                    {"hi", a.hi},
                    {"points", a.points},
                    {"scale", a.log_scale ? "log" : "linear"}});
  return {{"task", config.task},
          {is_kicked(config.task) ? "rotor" : "operator", config.base},
          {"axes", axes},
          {"options", config.options},
          {"workers", config.workers},
          {"seed", config.seed},
          {"budget", config.budget}};
}

SweepTable run_sweep(const SweepConfig& config) {
  // validation: axis names, arity, budget — all before any work
  if (config.axes.size() > 3)
    throw std::invalid_argument("sweep: at most 3 axes");
  const auto allowed = axis_whitelist(config.task);
  std::set<std::string> seen;
  std::size_t total = 1;
  for (const auto& axis : config.axes) {
    if (std::find(allowed.begin(), allowed.end(), axis.name) == allowed.end())
      throw std::invalid_argument("sweep: axis '" + axis.name + "' is not a spec field of task '" +
                                  config.task + "'");
    if (!seen.insert(axis.name).second)
      throw std::invalid_argument("sweep: duplicate axis '" + axis.name + "'");
    if (axis.points < 1) throw std::invalid_argument("sweep: axis needs at least one point");
    if (axis.log_scale && (axis.lo <= 0.0 || axis.hi <= 0.0))
      throw std::invalid_argument("sweep: log axes need positive endpoints");
    total *= static_cast<std::size_t>(axis.points);
  }
  if (total > config.budget)
    throw std::invalid_argument("sweep: grid of " + std::to_string(total) +
                                " points exceeds the budget " + std::to_string(config.budget));

  const TaskKernel kernel = make_kernel(config);  // also validates the base spec

  SweepTable table;
  table.config_echo = to_json(config);
  for (const auto& axis : config.axes) table.param_names.push_back(axis.name);
  table.value_names = kernel.value_names;
  table.records.resize(total);

  parallel_for_ordered(total, config.workers, [&](std::size_t flat) {
    // row-major decode: axes[0] outermost
    std::vector<std::pair<std::string, double>> params;
    std::size_t rem = flat;
    std::vector<double> coords(config.axes.size());
    for (std::size_t ai = config.axes.size(); ai-- > 0;) {
      const auto& axis = config.axes[ai];
      const int idx = static_cast<int>(rem % static_cast<std::size_t>(axis.points));
      rem /= static_cast<std::size_t>(axis.points);
      coords[ai] = axis_value(axis, idx);
    }
    for (std::size_t ai = 0; ai < config.axes.size(); ++ai)
      params.emplace_back(config.axes[ai].name, coords[ai]);

    SweepRecord& rec = table.records[flat];
    for (const auto& [name, v] : params) rec.params.push_back(v);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      rec.status = kernel.run(params, rec.values);
    } catch (const std::exception& e) {
      rec.status = "error";
      rec.message = e.what();
      rec.values.assign(kernel.value_names.size(), std::numeric_limits<double>::quiet_NaN());
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });

  for (const auto& rec : table.records)
    if (rec.status == "error") table.has_errors = true;
  return table;
}

void emit_csv(const SweepTable& table, std::ostream& os) {
  os << "# config " << table.config_echo.dump() << "\n";
  bool first = true;
  for (const auto& name : table.param_names) {
    os << (first ? "" : ",") << name;
    first = false;
  }
  for (const auto& name : table.value_names) {
    os << (first ? "" : ",") << name;
    first = false;
  }
  os << (first ? "status,wall_ms" : ",status,wall_ms") << "\n";
  for (const auto& rec : table.records) {
    for (const double p : rec.params) os << format_g17(p) << ",";
    for (const double v : rec.values) os << format_g17(v) << ",";
    os << rec.status << "," << format_g17(rec.wall_ms) << "\n";
  }
}

void emit_json(const SweepTable& table, std::ostream& os) {
  json records = json::array();
  for (const auto& rec : table.records) {
    json jr;
    for (std::size_t i = 0; i < rec.params.size(); ++i)
      jr["params"][table.param_names[i]] = rec.params[i];
    for (std::size_t i = 0; i < rec.values.size(); ++i)
      jr["values"][table.value_names[i]] = rec.values[i];
    jr["status"] = rec.status;
    if (!rec.message.empty()) jr["message"] = rec.message;
    jr["wall_ms"] = rec.wall_ms;
    records.push_back(std::move(jr));
  }
  const json out = {{"config", table.config_echo}, {"records", records}};
  os << out.dump(2) << "\n";
}

void emit(const SweepTable& table, const std::string& format, const std::string& path) {
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!path.empty() && path != "-") {
    file.open(path);
    if (!file) throw std::runtime_error("emit: cannot write " + path);
    os = &file;
  }
  if (format == "json")
    emit_json(table, *os);
  else if (format == "csv")
    emit_csv(table, *os);
  else
    throw std::invalid_argument("emit: unknown format '" + format + "'");
  if (os == &file && !file.good()) throw std::runtime_error("emit: write failed for " + path);
}

}  // namespace qplab
