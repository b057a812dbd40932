#include "qplab/continued_fraction.hpp"

#include <cmath>
#include <stdexcept>

namespace qplab {

namespace {
constexpr double kQuotientGuard = 1e8;  // doubles cannot resolve beyond this
constexpr std::int64_t kDenomGuard = std::int64_t(1) << 60;
}  // namespace

ContinuedFraction continued_fraction(double omega, int depth) {
  if (!(omega > 0.0 && omega < 1.0))
    throw std::invalid_argument("continued_fraction: omega must lie in (0,1)");
  if (depth < 1) throw std::invalid_argument("continued_fraction: depth must be >= 1");

  ContinuedFraction cf;
  // [0; a1, a2, ...]: p_{-1}/q_{-1} = 1/0, p_0/q_0 = 0/1
  std::int64_t p_prev = 1, q_prev = 0, p = 0, q = 1;
  double x = omega;
  for (int k = 0; k < depth; ++k) {
    const double inv = 1.0 / x;
    if (inv > kQuotientGuard) {  // near-rational: stop rather than fabricate digits
      cf.terminated_rational = true;
      break;
    }
    const std::int64_t a = static_cast<std::int64_t>(std::floor(inv));
    if (q > (kDenomGuard - q_prev) / a) {  // denominator overflow guard
      cf.terminated_rational = true;
      break;
    }
    const std::int64_t p_next = a * p + p_prev;
    const std::int64_t q_next = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    cf.quotients.push_back(a);
    cf.convergents.push_back(Convergent{p, q});
    const double rem = inv - static_cast<double>(a);
    if (rem <= 0.0) {  // exactly rational at machine precision
      cf.terminated_rational = true;
      break;
    }
    x = rem;
  }
  return cf;
}

}  // namespace qplab
