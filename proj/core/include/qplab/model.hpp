#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

// Potentials, torus orbits and operator specifications. Everything here is
// immutable after construction and safe to share across threads.

namespace qplab {

inline constexpr double golden_mean = 0.61803398874989484820;  // frac((1+sqrt 5)/2)
inline constexpr double two_pi = 6.28318530717958647692;

/// Reduce to the half-open unit interval [0, 1).
inline double frac_unit(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // x = -eps rounds to 1.0
  return f;
}

/// frac(n*w) with a two-product correction so round-off stays at ulp scale
/// for any |n*w| < 2^53 instead of growing with the product magnitude.
inline double frac_prod(double n, double w) {
  const double p = n * w;
  const double residue = std::fma(n, w, -p);  // n*w == p + residue exactly
  return frac_unit(frac_unit(std::fmod(p, 1.0)) + residue);
}

/// Distance on the circle R/Z.
inline double circle_dist(double a, double b) {
  double d = std::fabs(frac_unit(a) - frac_unit(b));
  return std::min(d, 1.0 - d);
}

struct Harmonic {
  std::vector<int> index;          // multi-index k on Z^b
  std::complex<double> amplitude;  // coefficient of exp(2 pi i k.theta)
};

/// Real trigonometric polynomial on the torus T^b, stored as the canonical
/// half of its complex Fourier coefficients (conjugate symmetry is enforced
/// at construction so evaluation is real for every phase).
class FourierPotential {
 public:
  /// b=1 series sum_k cos_coeffs[k-1] cos(2 pi k theta) + sin_coeffs[k-1] sin(2 pi k theta).
  static FourierPotential from_series(std::vector<double> cos_coeffs,
                                      std::vector<double> sin_coeffs = {},
                                      double constant = 0.0);
  /// General b >= 1 from complex harmonics; missing conjugates are filled in,
  /// conflicting ones rejected.
  static FourierPotential from_harmonics(int dimension, std::vector<Harmonic> harmonics);
  /// f(theta) = cos(2 pi theta).
  static FourierPotential cosine() { return from_series({1.0}); }
  /// f(theta1, theta2) = cos(2 pi theta1) + cos(2 pi theta2).
  static FourierPotential cosine2d();

  int dimension() const { return dimension_; }
  double constant_term() const { return constant_; }
  /// sum of |coefficients|; upper bound for max |f|.
  double max_abs_bound() const;

  double eval(std::span<const double> theta) const;
  /// Fast path for b=1.
  double eval1(double theta) const;

  /// Canonical-half harmonics (first nonzero index component positive);
  /// the conjugate partners are implicit.
  const std::vector<Harmonic>& harmonics() const { return harmonics_; }
  const std::vector<double>& cos_series() const { return cos_coeffs_; }
  const std::vector<double>& sin_series() const { return sin_coeffs_; }

 private:
  FourierPotential() = default;
  void check_nonconstant() const;

  int dimension_ = 1;
  double constant_ = 0.0;
  // b=1 fast path: harmonic k = index + 1
  std::vector<double> cos_coeffs_, sin_coeffs_;
  // general path (canonical half)
  std::vector<Harmonic> harmonics_;
};

/// Frequency vector omega in [0,1)^b, reduced mod 1 at construction.
class FrequencyVector {
 public:
  FrequencyVector() : components_{0.0} {}
  explicit FrequencyVector(std::vector<double> components);
  static FrequencyVector single(double omega) { return FrequencyVector({omega}); }

  int dimension() const { return static_cast<int>(components_.size()); }
  double operator[](int i) const { return components_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& components() const { return components_; }

 private:
  std::vector<double> components_;
};

enum class OrbitKind { Shift, SkewShift, MonomialPhase };

/// Orbit generators on the torus. All three kinds are evaluated in closed
/// form; there is no iterated accumulation, so round-off does not grow with
/// the step count.
///
///   shift          theta_n = theta + n omega            (componentwise mod 1)
///   skew shift     T(x1,x2) = (x1 + omega, x2 + x1); the potential reads the
///                  second coordinate, whose closed form is
///                  x2 + n x1 + n(n-1)/2 omega  (mod 1)
///   monomial phase theta_n = n^sigma alpha + theta, sigma > 1, n >= 0
class OrbitGenerator {
 public:
  static OrbitGenerator shift(FrequencyVector omega);
  static OrbitGenerator skew_shift(double omega);
  static OrbitGenerator monomial_phase(double sigma, double alpha);

  OrbitKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double alpha() const { return alpha_; }
  const FrequencyVector& frequency() const { return omega_; }

  /// Full orbit point after n steps from theta0. For the skew shift theta0
  /// is the pair (x1, x2). Monomial phase requires n >= 0.
  std::vector<double> phase(std::span<const double> theta0, std::int64_t n) const;

  /// The coordinate(s) the potential reads at step n: the whole point for
  /// shifts, the second skew-shift coordinate, the monomial phase itself.
  /// Scalar fast path valid for b = 1 orbits.
  double scalar_phase(std::span<const double> theta0, std::int64_t n) const;

 private:
  OrbitKind kind_ = OrbitKind::Shift;
  FrequencyVector omega_;
  double sigma_ = 0.0, alpha_ = 0.0;
};

enum class Geometry { Line, Strip, Box2D };

/// Full description of a discrete quasiperiodic Schrodinger operator
/// H = Delta + lambda V (or the pure diagonal lambda V when diagonal_only):
/// geometry, coupling, potential(s), frequency, phase and orbit generator.
struct OperatorSpec {
  Geometry geometry = Geometry::Line;
  double coupling = 0.0;      // lambda >= 0
  bool diagonal_only = false; // drop the Laplacian (the lambda^{-1} = 0 limit)
  std::vector<FourierPotential> potentials;  // one entry; strips carry m rows
  FrequencyVector frequency;
  std::vector<double> phase;  // theta in T^b; skew shift: (x1, x2)
  OrbitGenerator orbit = OrbitGenerator::shift(FrequencyVector::single(0.0));

  int strip_width() const { return static_cast<int>(potentials.size()); }
  const FourierPotential& potential() const { return potentials.front(); }

  /// Throws std::invalid_argument on inconsistent field combinations.
  void validate() const;
};

/// Almost Mathieu operator Delta + lambda cos(2 pi (theta + n omega)) on the line.
OperatorSpec amo_spec(double lambda, double omega, double theta);

/// Shifts the coordinate(s) the potential reads by t (mod 1); used by
/// phase-averaged estimators. Orbit structure is unchanged.
OperatorSpec with_phase_offset(const OperatorSpec& spec, double t);

/// Potential value lambda f(orbit phase at n) for line geometry.
double site_potential(const OperatorSpec& spec, std::int64_t n);

/// V_n over the half-open range [n_lo, n_hi), line geometry.
std::vector<double> potential_sequence(const OperatorSpec& spec, std::int64_t n_lo,
                                       std::int64_t n_hi);

/// Strip rows: m values per n, row-major over [n_lo, n_hi).
std::vector<double> strip_potential_rows(const OperatorSpec& spec, std::int64_t n_lo,
                                         std::int64_t n_hi);

/// V at a 2D box site: lambda f(theta1 + n1 w1, theta2 + n2 w2).
double box_site_potential(const OperatorSpec& spec, std::int64_t n1, std::int64_t n2);

}  // namespace qplab
