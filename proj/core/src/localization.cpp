#include "qplab/localization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qplab/cocycle.hpp"

namespace qplab {

namespace {

struct SideFit {
  double slope = 0.0;
  double r2 = 0.0;
  int points = 0;
};

// least squares of y against x
SideFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  SideFit f;
  f.points = static_cast<int>(x.size());
  if (f.points < 2) return f;
  const double n = static_cast<double>(f.points);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < f.points; ++i) {
    sx += x[static_cast<std::size_t>(i)];
    sy += y[static_cast<std::size_t>(i)];
    sxx += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    sxy += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    syy += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  }
  const double sxx_c = sxx - sx * sx / n;
  const double syy_c = syy - sy * sy / n;
  const double sxy_c = sxy - sx * sy / n;
  if (sxx_c <= 0.0) return f;
  f.slope = sxy_c / sxx_c;
  f.r2 = (syy_c > 0.0) ? (sxy_c * sxy_c) / (sxx_c * syy_c) : 0.0;
  return f;
}

}  // namespace

EigenfunctionProfile profile_amplitudes(std::span<const double> amp_sq, double energy,
                                        std::int64_t site_origin, int edge_margin,
                                        const ProfileOptions& opts) {
  const std::size_t dim = amp_sq.size();
  if (dim == 0) throw std::invalid_argument("profile: empty state");

  EigenfunctionProfile out;
  out.energy = energy;

  double ipr = 0.0, peak = -1.0;
  std::size_t center_idx = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    ipr += amp_sq[i] * amp_sq[i];
    if (amp_sq[i] > peak) {
      peak = amp_sq[i];
      center_idx = i;
    }
  }
  out.ipr = ipr;
  out.center = site_origin + static_cast<std::int64_t>(center_idx);

  const double floor_sq = opts.amplitude_floor * opts.amplitude_floor;
  const std::size_t margin = static_cast<std::size_t>(std::max(edge_margin, 0));
  std::vector<double> xs, ys;
  SideFit sides[2];
  for (int side = 0; side < 2; ++side) {
    xs.clear();
    ys.clear();
    if (side == 0) {
      for (std::size_t i = margin; i < center_idx; ++i) {
        if (amp_sq[i] < floor_sq) continue;
        xs.push_back(static_cast<double>(center_idx - i));
        ys.push_back(0.5 * std::log(amp_sq[i]));
      }
    } else {
      for (std::size_t i = center_idx + 1; i + margin < dim; ++i) {
        if (amp_sq[i] < floor_sq) continue;
        xs.push_back(static_cast<double>(i - center_idx));
        ys.push_back(0.5 * std::log(amp_sq[i]));
      }
    }
    sides[side] = fit_line(xs, ys);
  }

  double slope_sum = 0.0, r2_sum = 0.0;
  int used = 0, weight = 0;
  for (const SideFit& s : sides) {
    if (s.points < opts.min_fit_points) continue;
    slope_sum += s.slope;
    r2_sum += s.r2 * s.points;
    weight += s.points;
    ++used;
  }
  if (used == 0) {
    out.decay_rate = 0.0;
    out.fit_r2 = 0.0;
    out.decay_fit_valid = false;
    return out;
  }
  out.decay_rate = std::max(0.0, -(slope_sum / used));
  out.fit_r2 = r2_sum / weight;
  out.decay_fit_valid = true;
  return out;
}

EigenfunctionProfile profile(const Eigen::VectorXd& psi, double energy,
                             const FiniteHamiltonian& h, const ProfileOptions& opts) {
  if (std::fabs(psi.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("profile: state must be normalized");
  const int edge_margin = std::max(5, h.half_width / 100);
  if (h.geometry == Geometry::Line) {
    std::vector<double> amp(static_cast<std::size_t>(h.dim));
    for (int i = 0; i < h.dim; ++i) amp[static_cast<std::size_t>(i)] = psi(i) * psi(i);
    return profile_amplitudes(amp, energy, h.site_origin, edge_margin, opts);
  }
  if (h.geometry == Geometry::Strip) {
    const int m = h.strip_rows;
    const int L = h.dim / m;
    std::vector<double> amp(static_cast<std::size_t>(L), 0.0);
    for (int i = 0; i < h.dim; ++i) amp[static_cast<std::size_t>(i / m)] += psi(i) * psi(i);
    return profile_amplitudes(amp, energy, h.site_origin, edge_margin, opts);
  }
  throw std::invalid_argument("profile: line or strip geometry only");
}

LocalizationReport localization_report(const OperatorSpec& spec, int N, double e_lo,
                                       double e_hi, const LocalizationOptions& opts) {
  if (spec.geometry == Geometry::Box2D)
    throw std::invalid_argument("localization_report: line or strip geometry only");
  const FiniteHamiltonian h = build_finite(spec, N, BoundaryCondition::Dirichlet);
  const EigenSolution sol = eigs(h, /*want_vectors=*/true);

  const int L = (h.geometry == Geometry::Strip) ? h.dim / h.strip_rows : h.dim;
  const std::int64_t lo_site = h.site_origin + opts.interior_margin;
  const std::int64_t hi_site = h.site_origin + L - 1 - opts.interior_margin;

  LocalizationReport report;
  double ipr_sum = 0.0, decay_sum = 0.0;
  for (int j = 0; j < h.dim; ++j) {
    const double e = sol.spectrum.eigenvalues[static_cast<std::size_t>(j)];
    if (e < e_lo || e > e_hi) continue;
    LocalizationState st;
    st.profile = profile(sol.vectors.col(j), e, h, opts.profile);
    st.interior = st.profile.center >= lo_site && st.profile.center <= hi_site;
    st.localized = st.interior && st.profile.decay_fit_valid &&
                   st.profile.decay_rate > opts.decay_threshold &&
                   st.profile.fit_r2 > opts.r2_min;
    ipr_sum += st.profile.ipr;
    if (st.interior) ++report.interior_count;
    if (st.localized) {
      ++report.localized_count;
      decay_sum += st.profile.decay_rate;
    }
    report.states.push_back(std::move(st));
  }
  report.fraction_localized =
      report.interior_count > 0
          ? static_cast<double>(report.localized_count) / report.interior_count
          : 0.0;
  report.mean_decay = report.localized_count > 0 ? decay_sum / report.localized_count : 0.0;
  report.mean_ipr = report.states.empty() ? 0.0 : ipr_sum / static_cast<double>(report.states.size());
  return report;
}

std::vector<DecayLyapunovRow> decay_vs_lyapunov(const OperatorSpec& spec, int N,
                                                int sample_count, std::int64_t k,
                                                int theta_grid,
                                                const LocalizationOptions& opts) {
  if (spec.geometry != Geometry::Line)
    throw std::invalid_argument("decay_vs_lyapunov: line geometry only");
  if (sample_count < 1) throw std::invalid_argument("decay_vs_lyapunov: need samples");

  const FiniteHamiltonian h = build_finite(spec, N, BoundaryCondition::Dirichlet);
  const LocalizationReport report =
      localization_report(spec, N, -h.norm_bound, h.norm_bound, opts);

  std::vector<const LocalizationState*> localized;
  for (const auto& st : report.states)
    if (st.localized) localized.push_back(&st);
  if (localized.empty()) return {};

  std::vector<DecayLyapunovRow> rows;
  const int count = std::min<int>(sample_count, static_cast<int>(localized.size()));
  for (int i = 0; i < count; ++i) {
    const std::size_t idx =
        (count == 1) ? localized.size() / 2
                     : static_cast<std::size_t>(
                           (static_cast<double>(i) / (count - 1)) * (localized.size() - 1));
    const auto& st = *localized[idx];
    DecayLyapunovRow row;
    row.energy = st.profile.energy;
    row.decay_rate = st.profile.decay_rate;
    row.gamma = lyapunov_theta_avg(spec, row.energy, k, theta_grid).gamma;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qplab
