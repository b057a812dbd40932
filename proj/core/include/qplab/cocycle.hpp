#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qplab/model.hpp"

// Transfer-matrix cocycles and Lyapunov-exponent estimators for line
// operators. Products are rescaled by their Frobenius norm at every step, so
// arbitrarily long products never overflow; the matrix norm entering the
// exponent is the Frobenius norm, which differs from the operator norm by at
// most sqrt(2) and therefore contributes at most ln(sqrt 2)/k to a k-step
// estimate — the estimator limits agree.

namespace qplab {

/// 2x2 real matrix, row-major.
struct Mat2 {
  double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;

  static Mat2 identity() { return {}; }
  Mat2 operator*(const Mat2& r) const {
    return {m00 * r.m00 + m01 * r.m10, m00 * r.m01 + m01 * r.m11,
            m10 * r.m00 + m11 * r.m10, m10 * r.m01 + m11 * r.m11};
  }
  double frobenius_norm() const {
    return std::sqrt(m00 * m00 + m01 * m01 + m10 * m10 + m11 * m11);
  }
  double det() const { return m00 * m11 - m01 * m10; }
  double trace() const { return m00 + m11; }
  void scale(double s) { m00 *= s; m01 *= s; m10 *= s; m11 *= s; }
};

/// One-step transfer matrix [[E - v, -1], [1, 0]]; determinant exactly 1.
inline Mat2 transfer_step(double E, double v) { return {E - v, -1.0, 1.0, 0.0}; }

/// Rescaled running product: the full product equals
/// exp(log_norm) * normalized with ||normalized||_F = 1, so
/// ln||product||_F = log_norm.
struct CocycleProduct {
  Mat2 normalized = Mat2::identity();
  double log_norm = 0.0;
  std::int64_t steps = 0;
  double log_norm_halfway = 0.0;  // accumulator snapshot at steps/2
};

/// Left-ordered product A(k-1)...A(1)A(0) over the given potential values.
CocycleProduct cocycle_product_over(std::span<const double> v, double E);

/// M_k(theta, E) for a line operator; k = 0 yields the identity with a zero
/// accumulator.
CocycleProduct cocycle_product(const OperatorSpec& spec, double E,
                               std::int64_t k);

struct LyapunovEstimate {
  double energy = 0.0;
  double gamma = 0.0;       // estimate, natural-log units per step; >= -1e-6
  double stderr_ = 0.0;     // theta-sample spread, or (k, k/2) difference
  std::int64_t steps = 0;
  int theta_samples = 1;
  double gamma_half = 0.0;  // estimate at k/2 (convergence diagnostic)
};

/// (1/k) ln||M_k(theta)|| at the spec's own phase. stderr_ reports the
/// difference between the k and k/2 estimates. With richardson = true the
/// reported gamma is the (k, k/2) extrapolation 2 g_k - g_{k/2}.
LyapunovEstimate lyapunov_orbit(const OperatorSpec& spec, double E, std::int64_t k,
                                bool richardson = false);

/// Average of (1/k) ln||M_k(theta_j)|| over an equispaced theta grid of size
/// M >= 2 with fixed offset 1/(2M) + golden*1e-3 (never commensurate with the
/// common test frequencies). stderr_ = sample standard deviation / sqrt(M).
LyapunovEstimate lyapunov_theta_avg(const OperatorSpec& spec, double E, std::int64_t k,
                                    int grid_size, bool richardson = false);

/// One theta-averaged estimate per grid energy. Potential sequences are
/// shared across energies; results are aggregated in input order.
std::vector<LyapunovEstimate> lyapunov_curve(const OperatorSpec& spec,
                                             std::span<const double> energies,
                                             std::int64_t k, int grid_size);

/// Grid offset used by the theta-averaged estimators.
double lyapunov_grid_point(int j, int grid_size);

}  // namespace qplab
