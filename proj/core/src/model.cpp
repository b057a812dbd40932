#include "qplab/model.hpp"

#include <algorithm>
#include <map>

namespace qplab {

namespace {

// Canonical representative of a +/-k harmonic pair: first nonzero component
// positive. Returns 0 for the zero index, +1 if canonical, -1 otherwise.
int index_orientation(const std::vector<int>& k) {
  for (int c : k) {
    if (c > 0) return 1;
    if (c < 0) return -1;
  }
  return 0;
}

std::vector<int> negated(std::vector<int> k) {
  for (int& c : k) c = -c;
  return k;
}

}  // namespace

FourierPotential FourierPotential::from_series(std::vector<double> cos_coeffs,
                                               std::vector<double> sin_coeffs,
                                               double constant) {
  if (sin_coeffs.empty()) sin_coeffs.assign(cos_coeffs.size(), 0.0);
  if (cos_coeffs.size() != sin_coeffs.size())
    throw std::invalid_argument("FourierPotential: cosine/sine lists must have equal length");
  FourierPotential f;
  f.dimension_ = 1;
  f.constant_ = constant;
  f.cos_coeffs_ = std::move(cos_coeffs);
  f.sin_coeffs_ = std::move(sin_coeffs);
  f.harmonics_.reserve(f.cos_coeffs_.size());
  for (std::size_t k = 0; k < f.cos_coeffs_.size(); ++k) {
    // c cos + s sin = Re[(c - i s) e^{2 pi i k theta}]; canonical amplitude (c - i s)/2
    if (f.cos_coeffs_[k] == 0.0 && f.sin_coeffs_[k] == 0.0) continue;
    f.harmonics_.push_back(Harmonic{{static_cast<int>(k + 1)},
                                    {0.5 * f.cos_coeffs_[k], -0.5 * f.sin_coeffs_[k]}});
  }
  f.check_nonconstant();
  return f;
}

FourierPotential FourierPotential::from_harmonics(int dimension,
                                                  std::vector<Harmonic> harmonics) {
  if (dimension < 1) throw std::invalid_argument("FourierPotential: dimension must be >= 1");
  FourierPotential f;
  f.dimension_ = dimension;

  std::map<std::vector<int>, std::complex<double>> amp;
  for (auto& h : harmonics) {
    if (static_cast<int>(h.index.size()) != dimension)
      throw std::invalid_argument("FourierPotential: harmonic index arity mismatch");
    amp[h.index] += h.amplitude;
  }
  constexpr double conj_tol = 1e-12;
  for (const auto& [k, a] : amp) {
    const int orient = index_orientation(k);
    if (orient == 0) {
      if (std::fabs(a.imag()) > conj_tol)
        throw std::invalid_argument("FourierPotential: constant term must be real");
      f.constant_ += a.real();
      continue;
    }
    if (orient < 0) {
      // must match conj of the canonical partner (or define it if absent)
      auto it = amp.find(negated(k));
      if (it != amp.end()) {
        if (std::abs(std::conj(it->second) - a) > conj_tol)
          throw std::invalid_argument("FourierPotential: coefficients violate conjugate symmetry");
        continue;  // handled by the canonical entry
      }
      f.harmonics_.push_back(Harmonic{negated(k), std::conj(a)});
      continue;
    }
    f.harmonics_.push_back(Harmonic{k, a});
  }
  std::sort(f.harmonics_.begin(), f.harmonics_.end(),
            [](const Harmonic& x, const Harmonic& y) { return x.index < y.index; });

  if (dimension == 1) {
    int kmax = 0;
    for (const auto& h : f.harmonics_) kmax = std::max(kmax, h.index[0]);
    f.cos_coeffs_.assign(static_cast<std::size_t>(kmax), 0.0);
    f.sin_coeffs_.assign(static_cast<std::size_t>(kmax), 0.0);
    for (const auto& h : f.harmonics_) {
      f.cos_coeffs_[static_cast<std::size_t>(h.index[0] - 1)] = 2.0 * h.amplitude.real();
      f.sin_coeffs_[static_cast<std::size_t>(h.index[0] - 1)] = -2.0 * h.amplitude.imag();
    }
  }
  f.check_nonconstant();
  return f;
}

FourierPotential FourierPotential::cosine2d() {
  return from_harmonics(2, {Harmonic{{1, 0}, {0.5, 0.0}}, Harmonic{{0, 1}, {0.5, 0.0}}});
}

void FourierPotential::check_nonconstant() const {
  for (const auto& h : harmonics_)
    if (std::abs(h.amplitude) != 0.0) return;
  throw std::invalid_argument("FourierPotential: at least one nonconstant harmonic required");
}

double FourierPotential::max_abs_bound() const {
  double s = std::fabs(constant_);
  for (const auto& h : harmonics_) s += 2.0 * std::abs(h.amplitude);
  return s;
}

double FourierPotential::eval1(double theta) const {
  double v = constant_;
  for (std::size_t k = 0; k < cos_coeffs_.size(); ++k) {
    const double arg = two_pi * static_cast<double>(k + 1) * theta;
    if (cos_coeffs_[k] != 0.0) v += cos_coeffs_[k] * std::cos(arg);
    if (sin_coeffs_[k] != 0.0) v += sin_coeffs_[k] * std::sin(arg);
  }
  return v;
}

double FourierPotential::eval(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != dimension_)
    throw std::invalid_argument("FourierPotential::eval: phase arity mismatch");
  if (dimension_ == 1) return eval1(theta[0]);
  double v = constant_;
  for (const auto& h : harmonics_) {
    double arg = 0.0;
    for (int i = 0; i < dimension_; ++i) arg += static_cast<double>(h.index[static_cast<std::size_t>(i)]) * theta[static_cast<std::size_t>(i)];
    arg *= two_pi;
    // a e^{i arg} + conj: 2(Re a cos - Im a sin)
    v += 2.0 * (h.amplitude.real() * std::cos(arg) - h.amplitude.imag() * std::sin(arg));
  }
  return v;
}

FrequencyVector::FrequencyVector(std::vector<double> components)
    : components_(std::move(components)) {
  if (components_.empty())
    throw std::invalid_argument("FrequencyVector: at least one component");
  for (double& w : components_) w = frac_unit(w);
}

OrbitGenerator OrbitGenerator::shift(FrequencyVector omega) {
  OrbitGenerator g;
  g.kind_ = OrbitKind::Shift;
  g.omega_ = std::move(omega);
  return g;
}

OrbitGenerator OrbitGenerator::skew_shift(double omega) {
  OrbitGenerator g;
  g.kind_ = OrbitKind::SkewShift;
  g.omega_ = FrequencyVector::single(omega);
  return g;
}

OrbitGenerator OrbitGenerator::monomial_phase(double sigma, double alpha) {
  if (!(sigma > 1.0))
    throw std::invalid_argument("OrbitGenerator: monomial phase requires sigma > 1");
  OrbitGenerator g;
  g.kind_ = OrbitKind::MonomialPhase;
  g.sigma_ = sigma;
  g.alpha_ = alpha;
  g.omega_ = FrequencyVector::single(alpha);
  return g;
}

std::vector<double> OrbitGenerator::phase(std::span<const double> theta0,
                                          std::int64_t n) const {
  switch (kind_) {
    case OrbitKind::Shift: {
      if (static_cast<int>(theta0.size()) != omega_.dimension())
        throw std::invalid_argument("orbit_phase: phase arity mismatch");
      std::vector<double> out(theta0.size());
      for (std::size_t i = 0; i < theta0.size(); ++i)
        out[i] = frac_unit(theta0[i] + frac_prod(static_cast<double>(n), omega_[static_cast<int>(i)]));
      return out;
    }
    case OrbitKind::SkewShift: {
      if (theta0.size() != 2)
        throw std::invalid_argument("orbit_phase: skew shift needs (x1, x2)");
      const double nd = static_cast<double>(n);
      // exact closed form: x1 + n w, x2 + n x1 + n(n-1)/2 w
      const std::int64_t binom =
          (n % 2 == 0) ? (n / 2) * (n - 1) : n * ((n - 1) / 2);
      const double x1 = frac_unit(theta0[0] + frac_prod(nd, omega_[0]));
      const double x2 = frac_unit(frac_unit(theta0[1] + frac_prod(nd, theta0[0])) +
                                  frac_prod(static_cast<double>(binom), omega_[0]));
      return {x1, x2};
    }
    case OrbitKind::MonomialPhase: {
      if (n < 0)
        throw std::domain_error("orbit_phase: monomial phase defined for n >= 0 only");
      if (theta0.size() != 1)
        throw std::invalid_argument("orbit_phase: monomial phase is one-dimensional");
      const double t = std::pow(static_cast<double>(n), sigma_);
      return {frac_unit(theta0[0] + frac_prod(t, alpha_))};
    }
  }
  throw std::logic_error("orbit_phase: unreachable");
}

double OrbitGenerator::scalar_phase(std::span<const double> theta0, std::int64_t n) const {
  switch (kind_) {
    case OrbitKind::Shift:
      return frac_unit(theta0[0] + frac_prod(static_cast<double>(n), omega_[0]));
    case OrbitKind::SkewShift:
      return phase(theta0, n)[1];
    case OrbitKind::MonomialPhase:
      return phase(theta0, n)[0];
  }
  throw std::logic_error("scalar_phase: unreachable");
}

void OperatorSpec::validate() const {
  if (coupling < 0.0) throw std::invalid_argument("OperatorSpec: coupling must be >= 0");
  if (potentials.empty()) throw std::invalid_argument("OperatorSpec: missing potential");
  const int b = potentials.front().dimension();
  switch (geometry) {
    case Geometry::Line:
      if (potentials.size() != 1)
        throw std::invalid_argument("OperatorSpec: line geometry carries one potential");
      break;
    case Geometry::Strip:
      if (orbit.kind() != OrbitKind::Shift || b != 1)
        throw std::invalid_argument("OperatorSpec: strips use one-frequency shift orbits");
      for (const auto& f : potentials)
        if (f.dimension() != 1)
          throw std::invalid_argument("OperatorSpec: strip potentials are one-dimensional");
      break;
    case Geometry::Box2D:
      if (potentials.size() != 1 || b != 2)
        throw std::invalid_argument("OperatorSpec: 2D boxes need a single two-frequency potential");
      if (orbit.kind() != OrbitKind::Shift || frequency.dimension() != 2)
        throw std::invalid_argument("OperatorSpec: 2D boxes use a two-frequency shift orbit");
      break;
  }
  switch (orbit.kind()) {
    case OrbitKind::Shift:
      if (geometry != Geometry::Strip && static_cast<int>(phase.size()) != b)
        throw std::invalid_argument("OperatorSpec: phase arity must match the potential");
      if (geometry == Geometry::Strip && phase.size() != 1)
        throw std::invalid_argument("OperatorSpec: strip phase is a single angle");
      if (frequency.dimension() != static_cast<int>(phase.size()))
        throw std::invalid_argument("OperatorSpec: frequency arity must match the phase");
      break;
    case OrbitKind::SkewShift:
      if (phase.size() != 2)
        throw std::invalid_argument("OperatorSpec: skew-shift phase is (x1, x2)");
      if (b != 1)
        throw std::invalid_argument("OperatorSpec: skew-shift potentials are one-dimensional");
      break;
    case OrbitKind::MonomialPhase:
      if (phase.size() != 1 || b != 1)
        throw std::invalid_argument("OperatorSpec: monomial phase is one-dimensional");
      break;
  }
}

OperatorSpec amo_spec(double lambda, double omega, double theta) {
  OperatorSpec spec;
  spec.geometry = Geometry::Line;
  spec.coupling = lambda;
  spec.potentials = {FourierPotential::cosine()};
  spec.frequency = FrequencyVector::single(omega);
  spec.phase = {frac_unit(theta)};
  spec.orbit = OrbitGenerator::shift(spec.frequency);
  return spec;
}

OperatorSpec with_phase_offset(const OperatorSpec& spec, double t) {
  OperatorSpec out = spec;
  switch (spec.orbit.kind()) {
    case OrbitKind::Shift:
      for (double& c : out.phase) c = frac_unit(c + t);
      break;
    case OrbitKind::SkewShift:
      out.phase[1] = frac_unit(out.phase[1] + t);  // the coordinate f reads
      break;
    case OrbitKind::MonomialPhase:
      out.phase[0] = frac_unit(out.phase[0] + t);
      break;
  }
  return out;
}

double site_potential(const OperatorSpec& spec, std::int64_t n) {
  const auto& f = spec.potentials.front();
  if (spec.orbit.kind() == OrbitKind::Shift && f.dimension() > 1)
    return spec.coupling * f.eval(spec.orbit.phase(spec.phase, n));
  return spec.coupling * f.eval1(spec.orbit.scalar_phase(spec.phase, n));
}

std::vector<double> potential_sequence(const OperatorSpec& spec, std::int64_t n_lo,
                                       std::int64_t n_hi) {
  if (spec.geometry == Geometry::Box2D)
    throw std::invalid_argument("potential_sequence: line or strip geometry only");
  if (n_hi < n_lo) throw std::invalid_argument("potential_sequence: empty range");
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n_hi - n_lo));
  for (std::int64_t n = n_lo; n < n_hi; ++n) v.push_back(site_potential(spec, n));
  return v;
}

std::vector<double> strip_potential_rows(const OperatorSpec& spec, std::int64_t n_lo,
                                         std::int64_t n_hi) {
  if (spec.geometry != Geometry::Strip)
    throw std::invalid_argument("strip_potential_rows: strip geometry only");
  const int m = spec.strip_width();
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>((n_hi - n_lo) * m));
  for (std::int64_t n = n_lo; n < n_hi; ++n) {
    const double theta = spec.orbit.scalar_phase(spec.phase, n);
    for (int s = 0; s < m; ++s)
      v.push_back(spec.coupling * spec.potentials[static_cast<std::size_t>(s)].eval1(theta));
  }
  return v;
}

double box_site_potential(const OperatorSpec& spec, std::int64_t n1, std::int64_t n2) {
  const double t1 = frac_unit(spec.phase[0] + frac_prod(static_cast<double>(n1), spec.frequency[0]));
  const double t2 = frac_unit(spec.phase[1] + frac_prod(static_cast<double>(n2), spec.frequency[1]));
  const double args[2] = {t1, t2};
  return spec.coupling * spec.potentials.front().eval(args);
}

}  // namespace qplab
