#include "qplab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qplab {

namespace {
constexpr double kBoundaryBudget = 1e-6;
}

std::vector<double> default_time_grid(double t_max, int time_points) {
  if (time_points < 2 || t_max <= 0.0)
    throw std::invalid_argument("default_time_grid: need t_max > 0 and at least 2 points");
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(time_points));
  t.push_back(0.0);
  const double lo = std::max(t_max * 1e-4, 0.05);
  const int n = time_points - 1;
  for (int i = 0; i < n; ++i)
    t.push_back(lo * std::pow(t_max / lo, n == 1 ? 1.0 : static_cast<double>(i) / (n - 1)));
  t.back() = t_max;
  return t;
}

int recommended_half_width(double lambda, double t_max, double gamma_hint) {
  if (gamma_hint > 0.0)
    return static_cast<int>(std::ceil(200.0 + 10.0 / gamma_hint));
  (void)lambda;
  return static_cast<int>(std::ceil(2.5 * t_max));
}

EvolutionRun evolve(const OperatorSpec& spec, int N, const Eigen::VectorXcd& psi0,
                    std::vector<double> times, BoundaryCondition bc) {
  if (spec.geometry == Geometry::Box2D)
    throw std::invalid_argument("evolve: line or strip geometry only");
  if (times.empty()) throw std::invalid_argument("evolve: empty time grid");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1]))
      throw std::invalid_argument("evolve: times must be sorted and nonnegative");
  }

  const FiniteHamiltonian h = build_finite(spec, N, bc);
  const EigenSolution sol = eigs(h, /*want_vectors=*/true);
  const int dim = h.dim;
  const int nt = static_cast<int>(times.size());

  Eigen::VectorXcd start;
  if (psi0.size() == 0) {
    start = Eigen::VectorXcd::Zero(dim);
    int origin_idx;
    if (h.geometry == Geometry::Line)
      origin_idx = static_cast<int>(-h.site_origin);  // lattice site 0
    else
      origin_idx = static_cast<int>(-h.site_origin) * h.strip_rows + h.strip_rows / 2;
    start(origin_idx) = 1.0;
  } else {
    if (psi0.size() != dim) throw std::invalid_argument("evolve: psi0 dimension mismatch");
    start = psi0;
  }

  // overlaps w = Phi^T psi0 (real basis), then states = Phi (w .* e^{-i E t})
  const Eigen::MatrixXd& basis = sol.vectors;
  Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(sol.spectrum.eigenvalues.data(), dim);
  Eigen::VectorXd w_re = basis.transpose() * start.real();
  Eigen::VectorXd w_im = basis.transpose() * start.imag();

  Eigen::MatrixXd c_re(dim, nt), c_im(dim, nt);
  for (int ti = 0; ti < nt; ++ti) {
    const double t = times[static_cast<std::size_t>(ti)];
    for (int j = 0; j < dim; ++j) {
      const double ph = -e(j) * t;
      const double cs = std::cos(ph), sn = std::sin(ph);
      // (w_re + i w_im)(cs + i sn)
      c_re(j, ti) = w_re(j) * cs - w_im(j) * sn;
      c_im(j, ti) = w_re(j) * sn + w_im(j) * cs;
    }
  }

  EvolutionRun run;
  run.half_width = N;
  run.bc = bc;
  run.times = std::move(times);
  run.site_origin = h.site_origin;
  run.strip_rows = (h.geometry == Geometry::Strip) ? h.strip_rows : 1;
  run.energies = std::move(e);
  run.states.resize(dim, nt);
  run.states.real() = basis * c_re;
  run.states.imag() = basis * c_im;

  // second moments and boundary mass
  const int m = run.strip_rows;
  const int L = dim / m;
  const int edge = std::max(1, static_cast<int>(0.025 * L));
  run.x2_instant.resize(static_cast<std::size_t>(nt));
  run.boundary_mass.resize(static_cast<std::size_t>(nt));
  for (int ti = 0; ti < nt; ++ti) {
    double x2 = 0.0, bmass = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double p = std::norm(run.states(i, ti));
      const std::int64_t n = run.site_origin + i / m;
      x2 += p * static_cast<double>(n) * static_cast<double>(n);
      const int row = i / m;
      if (row < edge || row >= L - edge) bmass += p;
    }
    run.x2_instant[static_cast<std::size_t>(ti)] = x2;
    run.boundary_mass[static_cast<std::size_t>(ti)] = bmass;
    run.boundary_mass_max = std::max(run.boundary_mass_max, bmass);
  }
  run.valid = run.boundary_mass_max < kBoundaryBudget;
  return run;
}

MomentSeries moments(const EvolutionRun& run) {
  if (!run.valid)
    throw std::runtime_error(
        "moments: run breached the boundary-mass budget; rerun with a larger box");
  MomentSeries s;
  s.times = run.times;
  s.x2_instant = run.x2_instant;
  s.x2_avg.resize(s.times.size());
  double integral = 0.0;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (i == 0) {
      s.x2_avg[0] = s.x2_instant[0];  // Cesaro limit at the left end
      continue;
    }
    integral += 0.5 * (s.x2_instant[i] + s.x2_instant[i - 1]) * (s.times[i] - s.times[i - 1]);
    s.x2_avg[i] = s.times[i] > 0.0 ? integral / s.times[i] : s.x2_instant[i];
  }
  return s;
}

TransportFit transport_exponent(const MomentSeries& series, double t_lo, double t_hi) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t < t_lo || t > t_hi || t <= 0.0) continue;
    if (series.x2_avg[i] <= 0.0) continue;
    x.push_back(std::log(t));
    y.push_back(std::log(series.x2_avg[i]));
  }
  const int n = static_cast<int>(x.size());
  if (n < 8) throw std::invalid_argument("transport_exponent: fewer than 8 grid points in window");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[static_cast<std::size_t>(i)];
    sy += y[static_cast<std::size_t>(i)];
    sxx += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    sxy += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  }
  const double nd = n;
  const double sxx_c = sxx - sx * sx / nd;
  const double beta = (sxy - sx * sy / nd) / sxx_c;
  const double intercept = (sy - beta * sx) / nd;
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = y[static_cast<std::size_t>(i)] - (intercept + beta * x[static_cast<std::size_t>(i)]);
    ss_res += r * r;
  }
  TransportFit fit;
  fit.beta = beta;
  fit.points = n;
  fit.stderr_ = std::sqrt(ss_res / (nd - 2.0) / sxx_c);
  fit.ci_halfwidth = 1.96 * fit.stderr_;
  return fit;
}

StrongDLResult strong_dl_metric(const OperatorSpec& spec, int N, int theta_samples,
                                double t_max, int time_points, unsigned seed) {
  if (theta_samples < 1) throw std::invalid_argument("strong_dl_metric: need theta samples");
  const std::vector<double> grid = default_time_grid(t_max, time_points);

  StrongDLResult out;
  out.per_theta.reserve(static_cast<std::size_t>(theta_samples));
  double sum = 0.0, sum_half = 0.0;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  for (int j = 0; j < theta_samples; ++j) {
    double offset = static_cast<double>(j) / theta_samples;
    if (seed != 0) offset += jitter(rng) / theta_samples;
    const OperatorSpec shifted = with_phase_offset(spec, offset);
    const EvolutionRun run = evolve(shifted, N, {}, grid);
    if (!run.valid) out.any_invalid = true;
    double sup = 0.0, sup_half = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      sup = std::max(sup, run.x2_instant[i]);
      if (grid[i] <= 0.5 * t_max) sup_half = std::max(sup_half, run.x2_instant[i]);
    }
    out.per_theta.push_back(sup);
    sum += sup;
    sum_half += sup_half;
  }
  out.theta_mean_sup = sum / theta_samples;
  out.theta_mean_sup_half = sum_half / theta_samples;
  return out;
}

}  // namespace qplab
