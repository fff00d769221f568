#pragma once

// The root system R(u,v) = u(1+u)^{d-1} - v(1+v)^{d-1} behind the general-d
// kernel. The trivial root u = v is deflated analytically (synthetic division),
// the remaining d-1 roots come from Durand-Kerner iteration plus a Newton
// polish on the full polynomial. All kernel uses are symmetric in the
// nontrivial roots, so no ordering or branch tracking is attempted.

#include <cmath>
#include <complex>
#include <vector>

#include "contour.hpp"
#include "errors.hpp"
#include "logbinom.hpp"

namespace tasep::roots {

using num::cplx;

struct RootSet {
  cplx v;
  int d = 2;
  cplx trivial_root;                 // = v exactly
  std::vector<cplx> nontrivial;      // the other d-1 roots
};

// Descending coefficients of u(1+u)^{d-1} - rhs: coefficient of u^j is
// C(d-1, j-1) for j >= 1, constant term -rhs.
inline std::vector<cplx> expanded_poly(int d, cplx rhs) {
  std::vector<cplx> c(d + 1);
  for (int j = d; j >= 1; --j) c[d - j] = num::binomial(d - 1, j - 1);
  c[d] = -rhs;
  return c;
}

inline cplx poly_eval(const std::vector<cplx>& coeff, cplx u) {
  cplx acc{0.0, 0.0};
  for (const cplx& c : coeff) acc = acc * u + c;
  return acc;
}

inline RootSet offspring_roots(cplx v, int d) {
  if (d < 2) throw ValidationError("offspring_roots: d must be >= 2");
  // collision points of the trivial branch: R_u(v,v) = (1+v)^{d-2}(1+dv) = 0
  if (std::abs(v + 1.0 / d) < 1e-12 || (d > 2 && std::abs(v + 1.0) < 1e-12))
    throw Degenerate("offspring_roots: v at a root-collision point");

  const cplx rhs = v * std::pow(1.0 + v, d - 1);
  const auto full = expanded_poly(d, rhs);

  // synthetic division by (u - v); the remainder vanishes identically
  std::vector<cplx> q(d);
  q[0] = full[0];
  for (int k = 1; k < d; ++k) q[k] = full[k] + v * q[k - 1];

  const int deg = d - 1;
  std::vector<cplx> roots(deg);
  if (deg == 1) {
    roots[0] = -q[1] / q[0];
  } else {
    // Durand-Kerner from staggered points off the unit circle
    for (int i = 0; i < deg; ++i) {
      const double th = 2.0 * std::numbers::pi * i / deg + 0.4;
      roots[i] = -1.0 + 1.3 * cplx(std::cos(th), std::sin(th));
    }
    for (int it = 0; it < 200; ++it) {
      double move = 0.0;
      for (int i = 0; i < deg; ++i) {
        cplx denom{1.0, 0.0};
        for (int j = 0; j < deg; ++j)
          if (j != i) denom *= roots[i] - roots[j];
        const cplx delta = poly_eval(q, roots[i]) / denom;
        roots[i] -= delta;
        move = std::max(move, std::abs(delta));
      }
      if (move < 1e-14) break;
    }
  }

  // Newton polish on the full degree-d polynomial
  std::vector<cplx> dfull(d);
  for (int k = 0; k < d; ++k) dfull[k] = full[k] * double(d - k);
  const double scale = 1.0 + std::abs(rhs);
  for (cplx& u : roots) {
    for (int it = 0; it < 8; ++it) {
      const cplx f = poly_eval(full, u);
      if (std::abs(f) < 1e-15 * scale) break;
      const cplx df = poly_eval(dfull, u);
      if (df == cplx{0.0, 0.0}) break;
      u -= f / df;
    }
    if (std::abs(poly_eval(full, u)) > 1e-10 * scale)
      throw Degenerate("offspring_roots: root residual too large");
  }
  return {v, d, v, std::move(roots)};
}

template <class G>
cplx symmetric_sum(cplx v, int d, G&& g) {
  cplx acc{0.0, 0.0};
  for (const cplx& u : offspring_roots(v, d).nontrivial) acc += g(u);
  return acc;
}

}  // namespace tasep::roots
