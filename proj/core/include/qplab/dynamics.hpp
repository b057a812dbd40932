#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qplab/model.hpp"
#include "qplab/spectra.hpp"

namespace qplab {

/// Spectral-decomposition time evolution of a wave packet on a finite box.
/// Sign convention: Psi_t = exp(-i t H) Psi_0, i.e. Psi_t = sum_j
/// exp(-i t E_j) <phi_j, Psi_0> phi_j over the eigenpairs of the finite
/// section. Unitary at machine precision per time point; there is no
/// step-size error. A run whose boundary mass (outer 5% of sites) ever
/// exceeds 1e-6 completes but is marked invalid: the box is too small for
/// the requested horizon.
struct EvolutionRun {
  int half_width = 0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  std::vector<double> times;
  Eigen::MatrixXcd states;             // dim x times
  std::vector<double> x2_instant;      // sum_n |Psi_t(n)|^2 n^2 (long coordinate)
  std::vector<double> boundary_mass;   // per time point
  double boundary_mass_max = 0.0;
  bool valid = true;
  std::int64_t site_origin = 0;
  int strip_rows = 1;
  Eigen::VectorXd energies;            // spectrum of the finite section
};

/// psi0 empty selects the default delta packet at the lattice origin (line:
/// site 0; strips: (0, m/2)). Times must be sorted and nonnegative.
EvolutionRun evolve(const OperatorSpec& spec, int N, const Eigen::VectorXcd& psi0,
                    std::vector<double> times,
                    BoundaryCondition bc = BoundaryCondition::Dirichlet);

struct MomentSeries {
  std::vector<double> times;
  std::vector<double> x2_instant;
  std::vector<double> x2_avg;  // running Cesaro mean: (1/T) integral_0^T x2(t) dt, trapezoidal
};

/// Refuses invalid runs (grow the box instead).
MomentSeries moments(const EvolutionRun& run);

struct TransportFit {
  double beta = 0.0;       // slope of ln x2_avg against ln T
  double stderr_ = 0.0;
  double ci_halfwidth = 0.0;  // 1.96 * stderr
  int points = 0;
};

/// Least-squares transport exponent over grid times in [t_lo, t_hi];
/// refuses windows with fewer than 8 points.
TransportFit transport_exponent(const MomentSeries& series, double t_lo, double t_hi);

struct StrongDLResult {
  double theta_mean_sup = 0.0;       // mean over theta of max_t x2_instant
  double theta_mean_sup_half = 0.0;  // same restricted to t <= t_max / 2
  std::vector<double> per_theta;
  bool any_invalid = false;  // a flagged sub-run poisons the aggregate
};

/// Theta-averaged sup_t of the instantaneous second moment, the strong
/// dynamical-localization metric. sup is taken over the discrete time grid
/// (a lower bound for the true sup).
StrongDLResult strong_dl_metric(const OperatorSpec& spec, int N, int theta_samples,
                                double t_max, int time_points = 200, unsigned seed = 0);

/// {0} followed by time_points-1 log-spaced instants up to t_max.
std::vector<double> default_time_grid(double t_max, int time_points);

/// Box sizing rule: N >= 2.5 t_max for subcritical/ballistic runs (light cone
/// speed 2), N >= 200 + 10/gamma when a positive Lyapunov exponent is known.
/// Enforced post hoc by the boundary-mass invariant rather than trusted.
int recommended_half_width(double lambda, double t_max, double gamma_hint = 0.0);

}  // namespace qplab
