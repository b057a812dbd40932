// qplab — command-line front end for the quasiperiodic operator laboratory.
//
// Subcommands: lyapunov, spectrum, butterfly, localize, evolve, duality,
// kicked, sweep. Exit codes: 0 ok, 2 config error, 3 task failures present.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "json.hpp"
#include "qplab/cocycle.hpp"
#include "qplab/dynamics.hpp"
#include "qplab/kicked_rotor.hpp"
#include "qplab/localization.hpp"
#include "qplab/model.hpp"
#include "qplab/spec_io.hpp"
#include "qplab/spectra.hpp"
#include "qplab/sweep.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitTaskFailure = 3;

struct GlobalOptions {
  std::string config_path;
  std::string out_path = "-";
  std::string format = "csv";
  int workers = 1;
  unsigned seed = 0;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

// CSV goes to --out (stdout by default); the JSON summary of dual-output
// commands goes next to it (<out stem>.json), or to stdout when no file was
// requested.
void write_summary(const GlobalOptions& g, const json& summary) {
  if (g.out_path == "-" || g.out_path.empty()) {
    std::cout << summary.dump(2) << "\n";
    return;
  }
  std::string path = g.out_path;
  const auto dot = path.find_last_of('.');
  path = (dot == std::string::npos ? path : path.substr(0, dot)) + ".json";
  open_out(path) << summary.dump(2) << "\n";
}

template <typename Fn>
void write_csv(const GlobalOptions& g, Fn&& fill) {
  if (g.out_path == "-" || g.out_path.empty()) {
    fill(std::cout);
  } else {
    auto f = open_out(g.out_path);
    fill(f);
  }
}

qplab::OperatorSpec require_operator_spec(const GlobalOptions& g) {
  if (g.config_path.empty())
    throw std::invalid_argument("this subcommand needs --config <operator spec JSON>");
  return qplab::load_operator_spec(g.config_path);
}

int run_lyapunov(const GlobalOptions& g, double emin, double emax, int epoints,
                 std::int64_t k, int theta_grid, bool richardson) {
  const qplab::OperatorSpec spec = require_operator_spec(g);
  std::vector<double> energies(static_cast<std::size_t>(epoints));
  for (int i = 0; i < epoints; ++i)
    energies[static_cast<std::size_t>(i)] =
        epoints == 1 ? emin : emin + (emax - emin) * i / (epoints - 1);
  std::vector<qplab::LyapunovEstimate> curve;
  if (richardson) {
    for (const double e : energies)
      curve.push_back(qplab::lyapunov_theta_avg(spec, e, k, theta_grid, true));
  } else {
    curve = qplab::lyapunov_curve(spec, energies, k, theta_grid);
  }
  write_csv(g, [&](std::ostream& os) {
    os << "E,gamma,stderr,k\n";
    for (const auto& est : curve)
      os << qplab::format_g17(est.energy) << "," << qplab::format_g17(est.gamma) << ","
         << qplab::format_g17(est.stderr_) << "," << est.steps << "\n";
  });
  return kExitOk;
}

int run_spectrum(const GlobalOptions& g, int n, const std::string& bc) {
  const qplab::OperatorSpec spec = require_operator_spec(g);
  const auto boundary = bc == "periodic" ? qplab::BoundaryCondition::Periodic
                                         : qplab::BoundaryCondition::Dirichlet;
  const qplab::FiniteHamiltonian h = qplab::build_finite(spec, n, boundary);
  const qplab::EigenSolution sol = qplab::eigs(h, /*want_vectors=*/false);
  write_csv(g, [&](std::ostream& os) {
    os << "index,E\n";
    for (std::size_t i = 0; i < sol.spectrum.eigenvalues.size(); ++i)
      os << i << "," << qplab::format_g17(sol.spectrum.eigenvalues[i]) << "\n";
  });
  return kExitOk;
}

int run_butterfly(const GlobalOptions& g, double lambda_flag, int q_max, int theta_grid) {
  qplab::FourierPotential f = qplab::FourierPotential::cosine();
  double lambda = lambda_flag;
  if (!g.config_path.empty()) {
    const qplab::OperatorSpec spec = qplab::load_operator_spec(g.config_path);
    f = spec.potential();
    if (lambda < 0.0) lambda = spec.coupling;
  }
  if (lambda < 0.0) lambda = 2.0;
  const auto rows = qplab::butterfly(lambda, f, q_max, theta_grid);
  bool failures = false;
  write_csv(g, [&](std::ostream& os) {
    os << "p,q,band_lo,band_hi\n";
    for (const auto& row : rows) {
      if (!row.error.empty()) {
        failures = true;
        continue;
      }
      for (const auto& [lo, hi] : row.bands)
        os << row.p << "," << row.q << "," << qplab::format_g17(lo) << ","
           << qplab::format_g17(hi) << "\n";
    }
  });
  return failures ? kExitTaskFailure : kExitOk;
}

int run_localize(const GlobalOptions& g, int n, std::vector<double> window,
                 double threshold) {
  const qplab::OperatorSpec spec = require_operator_spec(g);
  qplab::LocalizationOptions opts;
  opts.decay_threshold = threshold;
  double e_lo = -1e300, e_hi = 1e300;
  if (window.size() == 2) {
    e_lo = window[0];
    e_hi = window[1];
  }
  const qplab::LocalizationReport report = qplab::localization_report(spec, n, e_lo, e_hi, opts);
  write_csv(g, [&](std::ostream& os) {
    os << "index,E,center,decay_rate,fit_r2,ipr,interior,localized\n";
    for (std::size_t i = 0; i < report.states.size(); ++i) {
      const auto& st = report.states[i];
      os << i << "," << qplab::format_g17(st.profile.energy) << "," << st.profile.center << ","
         << qplab::format_g17(st.profile.decay_rate) << ","
         << qplab::format_g17(st.profile.fit_r2) << "," << qplab::format_g17(st.profile.ipr)
         << "," << (st.interior ? 1 : 0) << "," << (st.localized ? 1 : 0) << "\n";
    }
  });
  write_summary(g, json{{"n", n},
                        {"e_window", {e_lo, e_hi}},
                        {"threshold", threshold},
                        {"states", report.states.size()},
                        {"interior_count", report.interior_count},
                        {"localized_count", report.localized_count},
                        {"fraction_localized", report.fraction_localized},
                        {"mean_decay", report.mean_decay},
                        {"mean_ipr", report.mean_ipr}});
  return kExitOk;
}

int run_evolve(const GlobalOptions& g, int n, double t_max, int t_points, int theta_samples) {
  const qplab::OperatorSpec spec = require_operator_spec(g);
  const qplab::EvolutionRun run =
      qplab::evolve(spec, n, {}, qplab::default_time_grid(t_max, t_points));
  json summary{{"n", n},
               {"t_max", t_max},
               {"t_points", t_points},
               {"boundary_mass_max", run.boundary_mass_max},
               {"valid", run.valid}};
  if (run.valid) {
    const qplab::MomentSeries series = qplab::moments(run);
    write_csv(g, [&](std::ostream& os) {
      os << "t,x2_instant,x2_avg\n";
      for (std::size_t i = 0; i < series.times.size(); ++i)
        os << qplab::format_g17(series.times[i]) << "," << qplab::format_g17(series.x2_instant[i])
           << "," << qplab::format_g17(series.x2_avg[i]) << "\n";
    });
    try {
      const qplab::TransportFit fit = qplab::transport_exponent(series, t_max / 10.0, t_max);
      summary["beta"] = fit.beta;
      summary["beta_stderr"] = fit.stderr_;
      summary["beta_window"] = {t_max / 10.0, t_max};
    } catch (const std::exception& e) {
      summary["beta_error"] = e.what();
    }
  }
  if (theta_samples > 1) {
    const qplab::StrongDLResult dl =
        qplab::strong_dl_metric(spec, n, theta_samples, t_max, t_points, g.seed);
    summary["strong_dl"] = {{"theta_samples", theta_samples},
                            {"theta_mean_sup", dl.theta_mean_sup},
                            {"theta_mean_sup_half", dl.theta_mean_sup_half},
                            {"any_invalid", dl.any_invalid},
                            {"seed", g.seed}};
  }
  write_summary(g, summary);
  return run.valid ? kExitOk : kExitTaskFailure;
}

int run_duality(const GlobalOptions& g, double lambda_flag, double omega_flag, int n,
                int samples) {
  double lambda = lambda_flag, omega = omega_flag;
  if (!g.config_path.empty()) {
    const qplab::OperatorSpec spec = qplab::load_operator_spec(g.config_path);
    if (lambda < 0.0) lambda = spec.coupling;
    if (omega < 0.0) omega = spec.frequency[0];
  }
  if (lambda < 0.0 || omega < 0.0)
    throw std::invalid_argument("duality needs --lambda/--omega or --config");
  const qplab::DualityReport rep = qplab::duality_check(lambda, omega, n, samples, g.seed);
  const json out{{"lambda", rep.lambda},
                 {"omega", rep.omega},
                 {"N", rep.box_half_width},
                 {"samples", rep.theta_samples},
                 {"hypothesis_scale", rep.hypothesis_scale},
                 {"scaled_distance", rep.scaled_distance},
                 {"stage_half_width", rep.stage_half_width},
                 {"stage_best_fit_scale", rep.stage_best_fit_scale},
                 {"stage_distance", rep.stage_distance},
                 {"seed", g.seed}};
  write_csv(g, [&](std::ostream& os) { os << out.dump(2) << "\n"; });
  return kExitOk;
}

int run_kicked(const GlobalOptions& g, double kappa, double a, double b, int n, int periods) {
  qplab::KickedRotorSpec spec;
  if (!g.config_path.empty()) spec = qplab::load_rotor_spec(g.config_path);
  if (kappa >= 0.0) spec.kappa = kappa;
  if (!std::isnan(a)) spec.a = a;
  if (!std::isnan(b)) spec.b = b;
  const qplab::RotorRun run = qplab::rotor_run(spec, n, periods);
  write_csv(g, [&](std::ostream& os) {
    os << "t,n2,saturation_metric\n";
    for (std::size_t t = 0; t < run.n2.size(); ++t)
      os << t << "," << qplab::format_g17(run.n2[t]) << ","
         << qplab::format_g17(run.running_metric[t]) << "\n";
  });
  write_summary(g, json{{"kappa", spec.kappa},
                        {"a", spec.a},
                        {"b", spec.b},
                        {"n", n},
                        {"periods", periods},
                        {"n2_final", run.n2.back()},
                        {"saturation_metric", run.saturation_metric},
                        {"norm_drift_max", run.norm_drift_max},
                        {"valid_periods", run.valid_periods}});
  return run.valid_periods == periods ? kExitOk : kExitTaskFailure;
}

int run_sweep_cmd(const GlobalOptions& g, const std::string& sweep_config) {
  qplab::SweepConfig config = qplab::load_sweep_config(sweep_config);
  if (g.workers > 0) config.workers = g.workers;
  if (g.seed != 0) config.seed = g.seed;
  if (!g.out_path.empty() && g.out_path != "-") config.out_path = g.out_path;
  if (!g.format.empty()) config.format = g.format;
  const qplab::SweepTable table = qplab::run_sweep(config);
  qplab::emit(table, config.format, config.out_path.empty() ? "-" : config.out_path);
  return table.has_errors ? kExitTaskFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qplab — numerical laboratory for quasiperiodic Schrodinger operators"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "operator/rotor spec JSON file");
  app.add_option("--out", g.out_path, "output path ('-' = stdout)");
  app.add_option("--format", g.format, "csv|json (sweep emission)");
  app.add_option("--workers", g.workers, "worker threads for sweeps");
  app.add_option("--seed", g.seed, "theta-sample jitter seed (0 = none; recorded in output)");

  // lyapunov
  double emin = -3.0, emax = 3.0;
  int epoints = 121, theta_grid = 64;
  std::int64_t cocycle_k = 1000;
  bool richardson = false;
  auto* lyap = app.add_subcommand("lyapunov", "theta-averaged Lyapunov exponent curve");
  lyap->add_option("--emin", emin, "energy grid start");
  lyap->add_option("--emax", emax, "energy grid end");
  lyap->add_option("--epoints", epoints, "energy grid points");
  lyap->add_option("--k", cocycle_k, "cocycle steps");
  lyap->add_option("--theta-grid", theta_grid, "theta grid size");
  lyap->add_flag("--richardson", richardson, "report the (k, k/2) extrapolation");

  // spectrum
  int spec_n = 200;
  std::string spec_bc = "dirichlet";
  auto* spectrum = app.add_subcommand("spectrum", "finite-section eigenvalues (CSV: index, E)");
  spectrum->add_option("--n", spec_n, "box half-width");
  spectrum->add_option("--bc", spec_bc, "dirichlet|periodic");

  // butterfly
  double bf_lambda = -1.0;
  int q_max = 20, bf_grid = 16;
  auto* bf = app.add_subcommand("butterfly", "band table over rationals p/q (CSV: p, q, band_lo, band_hi)");
  bf->add_option("--lambda", bf_lambda, "coupling (default from --config, else 2)");
  bf->add_option("--qmax", q_max, "largest denominator (<= 60)");
  bf->add_option("--theta-grid", bf_grid, "theta-union grid size (even keeps E -> -E symmetry)");

  // localize
  int loc_n = 300;
  std::vector<double> e_window;
  double threshold = 0.05;
  auto* loc = app.add_subcommand("localize", "eigenfunction localization report");
  loc->add_option("--n", loc_n, "box half-width");
  loc->add_option("--e-window", e_window, "energy window lo hi")->expected(2);
  loc->add_option("--threshold", threshold, "decay-rate classification threshold");

  // evolve
  int ev_n = 500, t_points = 200, theta_samples = 1;
  double t_max = 100.0;
  auto* ev = app.add_subcommand("evolve", "wave-packet second moments (CSV: t, x2_instant, x2_avg)");
  ev->add_option("--n", ev_n, "box half-width");
  ev->add_option("--tmax", t_max, "time horizon");
  ev->add_option("--tpoints", t_points, "time grid points");
  ev->add_option("--theta-samples", theta_samples, "theta samples for the strong-DL metric");

  // duality
  double du_lambda = -1.0, du_omega = -1.0;
  int du_n = 200, du_samples = 16;
  auto* du = app.add_subcommand("duality", "Aubry duality spectral check (JSON report)");
  du->add_option("--lambda", du_lambda, "coupling");
  du->add_option("--omega", du_omega, "frequency");
  du->add_option("--n", du_n, "box half-width");
  du->add_option("--samples", du_samples, "theta samples");

  // kicked
  double kappa = -1.0, rot_a = std::nan(""), rot_b = std::nan("");
  int rot_n = 1024, periods = 300;
  auto* kick = app.add_subcommand("kicked", "kicked-rotor momentum spread (CSV: t, n2, metric)");
  kick->add_option("--kappa", kappa, "kick strength");
  kick->add_option("--a", rot_a, "free-evolution quadratic coefficient");
  kick->add_option("--b", rot_b, "free-evolution linear coefficient");
  kick->add_option("--n", rot_n, "momentum half-width");
  kick->add_option("--periods", periods, "Floquet periods");

  // sweep
  std::string sweep_config;
  auto* sweep = app.add_subcommand("sweep", "parallel parameter sweep from a config file");
  sweep->add_option("config", sweep_config, "sweep config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (lyap->parsed()) return run_lyapunov(g, emin, emax, epoints, cocycle_k, theta_grid, richardson);
    if (spectrum->parsed()) return run_spectrum(g, spec_n, spec_bc);
    if (bf->parsed()) return run_butterfly(g, bf_lambda, q_max, bf_grid);
    if (loc->parsed()) return run_localize(g, loc_n, e_window, threshold);
    if (ev->parsed()) return run_evolve(g, ev_n, t_max, t_points, theta_samples);
    if (du->parsed()) return run_duality(g, du_lambda, du_omega, du_n, du_samples);
    if (kick->parsed()) return run_kicked(g, kappa, rot_a, rot_b, rot_n, periods);
    if (sweep->parsed()) return run_sweep_cmd(g, sweep_config);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTaskFailure;
  }
  return kExitOk;
}
