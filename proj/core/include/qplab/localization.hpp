#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qplab/model.hpp"
#include "qplab/spectra.hpp"

namespace qplab {

/// Per-eigenvector localization diagnostics. The decay rate comes from a
/// two-sided log-linear fit of ln|psi(n)| against |n - center|, left and
/// right slopes averaged; sites within the edge margin and amplitudes below
/// the floor are excluded from the fit. When no usable fit points remain
/// (an extended state in a small box) decay_rate and fit_r2 are zero and
/// decay_fit_valid is false.
struct EigenfunctionProfile {
  double energy = 0.0;
  std::int64_t center = 0;  // lattice coordinate of max |psi|
  double decay_rate = 0.0;  // per-site natural-log units, >= 0
  double fit_r2 = 0.0;      // in [0, 1]
  double ipr = 0.0;         // sum |psi|^4 for normalized psi
  bool decay_fit_valid = false;
};

struct ProfileOptions {
  double amplitude_floor = 1e-13;
  int min_fit_points = 3;  // per side
};

/// Profile of a normalized state given by per-site amplitudes-squared along
/// the long direction. `site_origin` is the lattice coordinate of index 0;
/// `edge_margin` sites at each end are excluded from the decay fit
/// (callers use max(5, N/100)).
EigenfunctionProfile profile_amplitudes(std::span<const double> amp_sq, double energy,
                                        std::int64_t site_origin, int edge_margin,
                                        const ProfileOptions& opts = {});

/// Profile of an eigenvector of a finite Hamiltonian (strips are collapsed
/// to per-rung mass along the long direction). Requires ||psi|| = 1 +- 1e-10.
EigenfunctionProfile profile(const Eigen::VectorXd& psi, double energy,
                             const FiniteHamiltonian& h, const ProfileOptions& opts = {});

struct LocalizationOptions {
  double decay_threshold = 0.05;
  double r2_min = 0.8;
  int interior_margin = 100;  // sites from the edge for a center to count as interior
  ProfileOptions profile;
};

struct LocalizationState {
  EigenfunctionProfile profile;
  bool interior = false;
  bool localized = false;
};

struct LocalizationReport {
  std::vector<LocalizationState> states;  // eigenstates in the energy window
  int interior_count = 0;
  int localized_count = 0;
  double fraction_localized = 0.0;  // localized / interior
  double mean_decay = 0.0;          // over localized states
  double mean_ipr = 0.0;            // over all states in the window
};

/// Solves the finite section at half-width N and classifies every eigenstate
/// in [e_lo, e_hi]. A state counts as localized when its center is interior,
/// decay_rate > decay_threshold and fit_r2 > r2_min.
LocalizationReport localization_report(const OperatorSpec& spec, int N, double e_lo,
                                       double e_hi, const LocalizationOptions& opts = {});

struct DecayLyapunovRow {
  double energy = 0.0;
  double decay_rate = 0.0;
  double gamma = 0.0;  // theta-averaged Lyapunov estimate at this energy
};

/// Pairs fitted decay rates of localized eigenstates with cocycle-module
/// Lyapunov estimates at the matching energies. Line geometry only; at most
/// sample_count states, spread evenly across the localized spectrum. Returns
/// an empty table when nothing is localized.
std::vector<DecayLyapunovRow> decay_vs_lyapunov(const OperatorSpec& spec, int N,
                                                int sample_count, std::int64_t k = 2000,
                                                int theta_grid = 64,
                                                const LocalizationOptions& opts = {});

}  // namespace qplab
