#pragma once

#include <cmath>
#include <limits>

namespace tasep::num {

// ln C(a,b) via log-gamma; -inf encodes the combinatorial zero (b < 0 or a < b).
// Valid for a up to ~1e7 without overflow.
inline double log_binomial(long long a, long long b) {
  if (b < 0 || a < b) return -std::numeric_limits<double>::infinity();
  if (b == 0 || b == a) return 0.0;
  return std::lgamma(double(a) + 1.0) - std::lgamma(double(b) + 1.0) -
         std::lgamma(double(a - b) + 1.0);
}

inline double binomial(long long a, long long b) {
  const double lb = log_binomial(a, b);
  return std::isinf(lb) ? 0.0 : std::exp(lb);
}

}  // namespace tasep::num
