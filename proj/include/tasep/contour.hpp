#pragma once

// Trapezoid-rule quadrature on circles. For integrands analytic in an annulus
// around the contour the error decays geometrically in the node count, so a
// doubling loop converges very fast.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace tasep::num {

using cplx = std::complex<double>;

struct ComplexContour {
  cplx center{0.0, 0.0};
  double radius = 1.0;
  int node_count = 64;
};

struct ContourNode {
  cplx node;
  cplx weight;
};

inline bool is_pow2(int m) { return m > 0 && (m & (m - 1)) == 0; }

inline void validate(const ComplexContour& c) {
  if (!(c.radius > 0.0)) throw ValidationError("contour radius must be positive");
  if (c.node_count < 8 || !is_pow2(c.node_count))
    throw ValidationError("contour node_count must be a power of two >= 8");
}

// Nodes center + r e^{2pi i j/m}, weights (2pi i/m)(node - center), so that
// sum_j weight_j f(node_j) ~ oint f(v) dv.
inline std::vector<ContourNode> contour_nodes(const ComplexContour& c) {
  validate(c);
  const int m = c.node_count;
  std::vector<ContourNode> out(m);
  const cplx scale = cplx(0.0, 2.0 * std::numbers::pi / m);
  for (int j = 0; j < m; ++j) {
    const double th = 2.0 * std::numbers::pi * j / m;
    const cplx offset = c.radius * cplx(std::cos(th), std::sin(th));
    out[j].node = c.center + offset;
    out[j].weight = scale * offset;
  }
  return out;
}

struct IntegralResult {
  cplx value{0.0, 0.0};
  int nodes_used = 0;
};

// oint f(v) dv with node doubling until |I_{2m} - I_m| < tol * max(1, |I_{2m}|).
template <class F>
IntegralResult contour_integral(F&& f, ComplexContour c, double tol, int cap = 1 << 16) {
  if (!(tol > 0.0)) throw ValidationError("contour_integral: tol must be positive");
  validate(c);
  cplx prev{0.0, 0.0};
  bool have_prev = false;
  for (int m = c.node_count; m <= cap; m *= 2) {
    c.node_count = m;
    cplx acc{0.0, 0.0};
    for (const auto& [node, weight] : contour_nodes(c)) acc += weight * f(node);
    if (have_prev && std::abs(acc - prev) < tol * std::max(1.0, std::abs(acc)))
      return {acc, m};
    prev = acc;
    have_prev = true;
  }
  throw NonConvergence("contour_integral: node cap exceeded");
}

}  // namespace tasep::num
