#pragma once

#include <cstdint>
#include <vector>

namespace qplab {

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;
};

/// Continued-fraction expansion of omega in (0,1): partial quotients
/// [a1, a2, ...] of [0; a1, a2, ...] and the convergents p_k/q_k in lowest
/// terms. Expansion stops early when the input is rational to machine
/// precision (zero remainder, or a partial quotient above the near-rational
/// guard 1e8), flagged in `terminated_rational`; running out of depth on an
/// irrational input is not a failure.
struct ContinuedFraction {
  std::vector<std::int64_t> quotients;
  std::vector<Convergent> convergents;
  bool terminated_rational = false;
};

ContinuedFraction continued_fraction(double omega, int depth);

}  // namespace qplab
