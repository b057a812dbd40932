#include "qplab/spectra.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "qplab/cocycle.hpp"

namespace qplab {

namespace {

int lattice_degree(const OperatorSpec& spec) {
  if (spec.diagonal_only) return 0;
  switch (spec.geometry) {
    case Geometry::Line:
      return 2;
    case Geometry::Strip: {
      const int m = spec.strip_width();
      return m == 1 ? 2 : (m == 2 ? 3 : 4);
    }
    case Geometry::Box2D:
      return 4;
  }
  return 2;
}

void check_lapack(int info, const char* routine) {
  if (info != 0)
    throw std::runtime_error(std::string(routine) + " failed, info = " + std::to_string(info));
}

}  // namespace

Eigen::MatrixXd FiniteHamiltonian::to_dense() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  const int ldab = bandwidth + 1;
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i <= bandwidth && j + i < dim; ++i) {
      const double v = band[static_cast<std::size_t>(j) * ldab + i];
      a(j + i, j) = v;
      a(j, j + i) = v;
    }
  for (const auto& [i, j, v] : wraps) {
    a(i, j) += v;
    a(j, i) += v;
  }
  return a;
}

void FiniteHamiltonian::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y.setZero(dim);
  const int ldab = bandwidth + 1;
  for (int j = 0; j < dim; ++j) {
    y(j) += band[static_cast<std::size_t>(j) * ldab] * x(j);
    for (int i = 1; i <= bandwidth && j + i < dim; ++i) {
      const double v = band[static_cast<std::size_t>(j) * ldab + i];
      if (v == 0.0) continue;
      y(j + i) += v * x(j);
      y(j) += v * x(j + i);
    }
  }
  for (const auto& [i, j, v] : wraps) {
    y(i) += v * x(j);
    y(j) += v * x(i);
  }
}

void FiniteHamiltonian::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  y.setZero(dim);
  const int ldab = bandwidth + 1;
  for (int j = 0; j < dim; ++j) {
    y(j) += band[static_cast<std::size_t>(j) * ldab] * x(j);
    for (int i = 1; i <= bandwidth && j + i < dim; ++i) {
      const double v = band[static_cast<std::size_t>(j) * ldab + i];
      if (v == 0.0) continue;
      y(j + i) += v * x(j);
      y(j) += v * x(j + i);
    }
  }
  for (const auto& [i, j, v] : wraps) {
    y(i) += v * x(j);
    y(j) += v * x(i);
  }
}

FiniteHamiltonian build_finite(const OperatorSpec& spec, int N, BoundaryCondition bc) {
  spec.validate();
  if (N < 1) throw std::invalid_argument("build_finite: N must be >= 1");

  FiniteHamiltonian h;
  h.bc = bc;
  h.geometry = spec.geometry;
  h.half_width = N;
  const double hop = spec.diagonal_only ? 0.0 : 1.0;
  const int L = 2 * N + 1;

  switch (spec.geometry) {
    case Geometry::Line: {
      const bool one_sided = spec.orbit.kind() == OrbitKind::MonomialPhase;
      h.site_origin = one_sided ? 0 : -N;
      h.dim = L;
      h.bandwidth = 1;
      h.strip_rows = 1;
      h.band.assign(static_cast<std::size_t>(h.dim) * 2, 0.0);
      const std::vector<double> v = potential_sequence(spec, h.site_origin, h.site_origin + L);
      for (int j = 0; j < h.dim; ++j) {
        h.band[static_cast<std::size_t>(j) * 2] = v[static_cast<std::size_t>(j)];
        if (j + 1 < h.dim) h.band[static_cast<std::size_t>(j) * 2 + 1] = hop;
      }
      if (bc == BoundaryCondition::Periodic) {
        if (h.dim < 3) throw std::invalid_argument("build_finite: periodic wrap needs dim >= 3");
        h.wraps.emplace_back(0, h.dim - 1, hop);
      }
      break;
    }
    case Geometry::Strip: {
      const int m = spec.strip_width();
      h.site_origin = -N;
      h.dim = L * m;
      h.bandwidth = m;
      h.strip_rows = m;
      const int ldab = m + 1;
      h.band.assign(static_cast<std::size_t>(h.dim) * ldab, 0.0);
      const std::vector<double> rows = strip_potential_rows(spec, -N, N + 1);
      for (int n = 0; n < L; ++n)
        for (int s = 0; s < m; ++s) {
          const int j = n * m + s;
          h.band[static_cast<std::size_t>(j) * ldab] = rows[static_cast<std::size_t>(j)];
          if (s + 1 < m) h.band[static_cast<std::size_t>(j) * ldab + 1] = hop;  // rung
          if (n + 1 < L) h.band[static_cast<std::size_t>(j) * ldab + m] = hop;  // long direction
        }
      if (bc == BoundaryCondition::Periodic) {
        if (L < 3) throw std::invalid_argument("build_finite: periodic wrap needs length >= 3");
        for (int s = 0; s < m; ++s) h.wraps.emplace_back(s, (L - 1) * m + s, hop);
      }
      break;
    }
    case Geometry::Box2D: {
      if (bc == BoundaryCondition::Periodic)
        throw std::invalid_argument("build_finite: 2D boxes are Dirichlet only");
      const int W = L;
      h.site_origin = -N;
      h.dim = W * W;
      h.bandwidth = W;
      h.strip_rows = W;
      if (h.dim > kEigsDimCap)
        throw std::length_error("build_finite: 2D box dimension exceeds the dense cap");
      const int ldab = W + 1;
      h.band.assign(static_cast<std::size_t>(h.dim) * ldab, 0.0);
      for (int r = 0; r < W; ++r)
        for (int c = 0; c < W; ++c) {
          const int j = r * W + c;
          h.band[static_cast<std::size_t>(j) * ldab] =
              box_site_potential(spec, r - N, c - N);
          if (c + 1 < W) h.band[static_cast<std::size_t>(j) * ldab + 1] = hop;
          if (r + 1 < W) h.band[static_cast<std::size_t>(j) * ldab + W] = hop;
        }
      break;
    }
  }
  h.norm_bound = lattice_degree(spec) + spec.coupling * spec.potential().max_abs_bound();
  return h;
}

EigenSolution eigs(const FiniteHamiltonian& h, bool want_vectors) {
  if (h.dim > kEigsDimCap)
    throw std::length_error(
        "eigs: dimension " + std::to_string(h.dim) + " exceeds the cap " +
        std::to_string(kEigsDimCap) + "; an iterative mode is out of scope in v1");
  if (h.dim < 1) throw std::invalid_argument("eigs: empty Hamiltonian");

  EigenSolution out;
  out.spectrum.kind = SpectrumEstimate::Kind::Points;
  out.spectrum.box_half_width = h.half_width;
  out.spectrum.bc = h.bc;
  std::vector<double> w(static_cast<std::size_t>(h.dim));
  const char jobz = want_vectors ? 'V' : 'N';

  if (h.wraps.empty() && h.bandwidth == 1) {
    std::vector<double> d(static_cast<std::size_t>(h.dim)), e(static_cast<std::size_t>(std::max(h.dim - 1, 1)));
    for (int j = 0; j < h.dim; ++j) {
      d[static_cast<std::size_t>(j)] = h.band[static_cast<std::size_t>(j) * 2];
      if (j + 1 < h.dim) e[static_cast<std::size_t>(j)] = h.band[static_cast<std::size_t>(j) * 2 + 1];
    }
    if (want_vectors) out.vectors.resize(h.dim, h.dim);
    check_lapack(LAPACKE_dstevd(LAPACK_COL_MAJOR, jobz, h.dim, d.data(), e.data(),
                                want_vectors ? out.vectors.data() : nullptr, h.dim),
                 "dstevd");
    w = std::move(d);
  } else if (h.wraps.empty()) {
    std::vector<double> ab = h.band;  // destroyed by the solver
    if (want_vectors) out.vectors.resize(h.dim, h.dim);
    check_lapack(LAPACKE_dsbevd(LAPACK_COL_MAJOR, jobz, 'L', h.dim, h.bandwidth,
                                ab.data(), h.bandwidth + 1, w.data(),
                                want_vectors ? out.vectors.data() : nullptr, h.dim),
                 "dsbevd");
  } else {
    Eigen::MatrixXd a = h.to_dense();
    if (want_vectors) {
      check_lapack(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', h.dim, a.data(), h.dim, w.data()),
                   "dsyevd");
      out.vectors = std::move(a);
    } else {
      check_lapack(LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'L', h.dim, a.data(), h.dim, w.data()),
                   "dsyev");
    }
  }
  out.spectrum.eigenvalues = std::move(w);
  return out;
}

// ---------------------------------------------------------------------------
// Rational band spectra via the Floquet discriminant.

namespace {

struct ScaledTrace {
  double t = 0.0;        // normalized trace
  double logscale = 0.0; // tr M_q = t * exp(logscale)
};

ScaledTrace discriminant(double E, std::span<const double> v) {
  Mat2 m = Mat2::identity();
  double acc = 0.0;
  for (const double vn : v) {
    m = transfer_step(E, vn) * m;
    const double s = m.frobenius_norm();
    m.scale(1.0 / s);
    acc += std::log(s);
  }
  return {m.trace(), acc};
}

double discr_signed(double E, std::span<const double> v) {
  const auto [t, a] = discriminant(E, v);
  if (t == 0.0) return 0.0;
  if (std::log(std::fabs(t)) + a > 700.0) return std::copysign(HUGE_VAL, t);
  return t * std::exp(a);
}

double discr_logmag(double E, std::span<const double> v) {
  const auto [t, a] = discriminant(E, v);
  if (t == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(std::fabs(t)) + a;
}

constexpr double kEdgeTol = 1e-10;

template <typename Fn>
double bisect(Fn&& f, double lo, double hi, double flo) {
  while (hi - lo > kEdgeTol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<std::pair<double, double>> bands_single_theta(std::span<const double> v,
                                                          double radius) {
  const std::size_t q = v.size();
  const int mesh_n = static_cast<int>(4 * q);
  std::vector<double> mesh(static_cast<std::size_t>(mesh_n) + 1);
  for (int i = 0; i <= mesh_n; ++i)
    mesh[static_cast<std::size_t>(i)] = -radius * std::cos(M_PI * i / mesh_n);
  std::vector<double> dval(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) dval[i] = discr_signed(mesh[i], v);

  std::set<double> points(mesh.begin(), mesh.end());
  const double ln2 = std::log(2.0);

  // roots of D -/+ 2 bracketed by the mesh
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    for (const double level : {2.0, -2.0}) {
      const double flo = dval[i] - level, fhi = dval[i + 1] - level;
      if (flo == 0.0 || fhi == 0.0) continue;  // mesh point already in `points`
      if ((flo < 0.0) != (fhi < 0.0))
        points.insert(bisect([&](double x) { return discr_signed(x, v) - level; },
                             mesh[i], mesh[i + 1], flo));
    }
  }

  auto inside = [&](double x) { return discr_logmag(x, v) <= ln2 + 1e-12; };

  // refine inside/outside flips that sign-change detection missed
  // (tangential band touchings, double roots)
  std::vector<double> part(points.begin(), points.end());
  std::vector<char> mid_in(part.size() - 1);
  for (std::size_t i = 0; i + 1 < part.size(); ++i)
    mid_in[i] = inside(0.5 * (part[i] + part[i + 1]));
  std::vector<double> extra;
  for (std::size_t i = 0; i + 1 < mid_in.size(); ++i) {
    if (mid_in[i] == mid_in[i + 1]) continue;
    const double a = 0.5 * (part[i] + part[i + 1]);
    const double b = 0.5 * (part[i + 1] + part[i + 2]);
    const double fa = discr_logmag(a, v) - ln2;
    extra.push_back(bisect([&](double x) { return discr_logmag(x, v) - ln2; }, a, b, fa));
  }
  points.insert(extra.begin(), extra.end());

  part.assign(points.begin(), points.end());
  std::vector<std::pair<double, double>> bands;
  double lo = 0.0;
  bool open = false;
  for (std::size_t i = 0; i + 1 < part.size(); ++i) {
    const bool in = inside(0.5 * (part[i] + part[i + 1]));
    if (in && !open) {
      lo = part[i];
      open = true;
    } else if (!in && open) {
      bands.emplace_back(lo, part[i]);
      open = false;
    }
  }
  if (open) bands.emplace_back(lo, part.back());
  return bands;
}

std::vector<std::pair<double, double>> merge_bands(
    std::vector<std::pair<double, double>> bands, double tol) {
  if (bands.empty()) return bands;
  std::sort(bands.begin(), bands.end());
  std::vector<std::pair<double, double>> out;
  out.push_back(bands.front());
  for (std::size_t i = 1; i < bands.size(); ++i) {
    if (bands[i].first <= out.back().second + tol)
      out.back().second = std::max(out.back().second, bands[i].second);
    else
      out.push_back(bands[i]);
  }
  return out;
}

}  // namespace

std::vector<std::pair<double, double>> rational_band_spectrum(
    double lambda, const FourierPotential& f, std::int64_t p, std::int64_t q,
    std::span<const double> theta_grid) {
  if (q < 1 || p < 0 || p > q) throw std::invalid_argument("rational_band_spectrum: need 0 <= p <= q, q >= 1");
  if (std::gcd(p, q) != 1) throw std::invalid_argument("rational_band_spectrum: p/q must be reduced");
  if (q > 200) throw std::invalid_argument("rational_band_spectrum: q > 200 exceeds the precision limit");
  if (f.dimension() != 1)
    throw std::invalid_argument("rational_band_spectrum: one-frequency potentials only");
  if (theta_grid.empty()) throw std::invalid_argument("rational_band_spectrum: empty theta grid");

  const double radius = 2.0 + lambda * f.max_abs_bound() + 0.5;
  std::vector<std::pair<double, double>> all;
  std::vector<double> v(static_cast<std::size_t>(q));
  for (const double theta : theta_grid) {
    for (std::int64_t n = 0; n < q; ++n)
      v[static_cast<std::size_t>(n)] =
          lambda * f.eval1(frac_unit(theta + frac_prod(static_cast<double>(n),
                                                       static_cast<double>(p) / static_cast<double>(q))));
    auto bands = bands_single_theta(v, radius);
    all.insert(all.end(), bands.begin(), bands.end());
  }
  return merge_bands(std::move(all), 1e-9);
}

std::vector<ButterflyRow> butterfly(double lambda, const FourierPotential& f,
                                    int q_max, int theta_grid_size) {
  if (q_max < 1 || q_max > 60)
    throw std::invalid_argument("butterfly: q_max must lie in [1, 60]");
  if (theta_grid_size < 1) throw std::invalid_argument("butterfly: empty theta grid");
  std::vector<double> grid(static_cast<std::size_t>(theta_grid_size));
  for (int j = 0; j < theta_grid_size; ++j)
    grid[static_cast<std::size_t>(j)] = static_cast<double>(j) / theta_grid_size;

  std::vector<ButterflyRow> rows;
  for (std::int64_t q = 1; q <= q_max; ++q) {
    const std::int64_t p_hi = (q == 1) ? 1 : q - 1;
    for (std::int64_t p = (q == 1) ? 0 : 1; p <= p_hi; ++p) {
      if (std::gcd(p, q) != 1) continue;
      ButterflyRow row;
      row.p = p;
      row.q = q;
      try {
        row.bands = rational_band_spectrum(lambda, f, p, q, grid);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

double ids(const SpectrumEstimate& spectrum, double E) {
  if (spectrum.kind != SpectrumEstimate::Kind::Points)
    throw std::invalid_argument("ids: band-interval spectra unsupported; need a point list");
  if (spectrum.eigenvalues.empty()) throw std::invalid_argument("ids: empty spectrum");
  const auto& ev = spectrum.eigenvalues;
  const auto it = std::upper_bound(ev.begin(), ev.end(), E);
  return static_cast<double>(it - ev.begin()) / static_cast<double>(ev.size());
}

double hausdorff_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("hausdorff_distance: empty point set");
  auto directed = [](std::span<const double> from, std::span<const double> to) {
    double worst = 0.0;
    for (const double x : from) {
      auto it = std::lower_bound(to.begin(), to.end(), x);
      double best = std::numeric_limits<double>::infinity();
      if (it != to.end()) best = std::min(best, *it - x);
      if (it != to.begin()) best = std::min(best, x - *(it - 1));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

namespace {

// Theta-union of finite-section eigenvalues under both boundary conditions,
// keeping bulk states only: an eigenvector with >= 25% of its mass in the
// outer 5% of sites is a Dirichlet edge mode or a periodic seam mode, an
// artifact of the truncation living inside spectral gaps, and would dominate
// the Hausdorff distance without approximating the spectrum.
std::vector<double> theta_union_eigenvalues(double lambda, double omega, int N,
                                            int samples, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  std::vector<double> values;
  for (int j = 0; j < samples; ++j) {
    double theta = (j + 0.5) / samples;
    if (seed != 0) theta += jitter(rng) / samples;
    const OperatorSpec spec = amo_spec(lambda, omega, frac_unit(theta));
    for (const auto bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Periodic}) {
      const FiniteHamiltonian h = build_finite(spec, N, bc);
      const EigenSolution sol = eigs(h, /*want_vectors=*/true);
      const int edge = std::max(1, static_cast<int>(0.05 * h.dim));
      for (int c = 0; c < h.dim; ++c) {
        double boundary_mass = 0.0;
        for (int i = 0; i < edge; ++i)
          boundary_mass += sol.vectors(i, c) * sol.vectors(i, c) +
                           sol.vectors(h.dim - 1 - i, c) * sol.vectors(h.dim - 1 - i, c);
        if (boundary_mass < 0.25)
          values.push_back(sol.spectrum.eigenvalues[static_cast<std::size_t>(c)]);
      }
    }
  }
  std::sort(values.begin(), values.end());
  return values;
}

double scaled_distance(const std::vector<double>& a, const std::vector<double>& b,
                       double scale) {
  std::vector<double> sb(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) sb[i] = scale * b[i];
  if (scale < 0.0) std::reverse(sb.begin(), sb.end());
  return hausdorff_distance(a, sb);
}

}  // namespace

DualityReport duality_check(double lambda, double omega, int N, int theta_samples,
                            unsigned seed) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("duality_check: lambda must be positive (the dual coupling of 0 is infinite)");
  if (theta_samples < 1) throw std::invalid_argument("duality_check: need theta samples");

  DualityReport report;
  report.lambda = lambda;
  report.omega = omega;
  report.box_half_width = N;
  report.theta_samples = theta_samples;
  report.hypothesis_scale = lambda / 2.0;
  const double dual_lambda = 4.0 / lambda;

  // Brute-force validation stage: fit the energy scaling on a small box
  // before trusting the lambda/2 hypothesis on the big one.
  const int stage_N = std::min(N, 200);
  report.stage_half_width = stage_N;
  {
    const auto a = theta_union_eigenvalues(lambda, omega, stage_N, theta_samples, seed);
    const auto b = theta_union_eigenvalues(dual_lambda, omega, stage_N, theta_samples, seed);
    report.stage_distance = scaled_distance(a, b, report.hypothesis_scale);
    double best_s = report.hypothesis_scale, best_d = report.stage_distance;
    const double s_lo = 0.5 * report.hypothesis_scale, s_hi = 1.5 * report.hypothesis_scale;
    for (int i = 0; i <= 200; ++i) {
      const double s = s_lo + (s_hi - s_lo) * i / 200.0;
      const double d = scaled_distance(a, b, s);
      if (d < best_d) {
        best_d = d;
        best_s = s;
      }
    }
    double lo = best_s - (s_hi - s_lo) / 200.0, hi = best_s + (s_hi - s_lo) / 200.0;
    for (int it = 0; it < 40; ++it) {  // golden-section polish
      const double m1 = lo + 0.381966011 * (hi - lo);
      const double m2 = hi - 0.381966011 * (hi - lo);
      if (scaled_distance(a, b, m1) <= scaled_distance(a, b, m2))
        hi = m2;
      else
        lo = m1;
    }
    report.stage_best_fit_scale = 0.5 * (lo + hi);
  }

  const auto a = theta_union_eigenvalues(lambda, omega, N, theta_samples, seed);
  const auto b = theta_union_eigenvalues(dual_lambda, omega, N, theta_samples, seed);
  report.scaled_distance = scaled_distance(a, b, report.hypothesis_scale);
  return report;
}

}  // namespace qplab
