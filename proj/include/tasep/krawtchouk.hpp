#pragma once

// Krawtchouk cross-checks: the Krawtchouk-polynomial representation of Psi,
// the S matrix with its explicit d=2 inverse, and the alternative d=2 Phi
// contour formula. The variable identification is z = x + d(N-1).

#include <cmath>
#include <vector>

#include "contour.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "logbinom.hpp"

namespace tasep::kraw {

struct KrawtchoukContext {
  double p = 0.5;
  int n_particles = 1;  // N
  int d = 2;
  int t = 0;

  int cap_t() const { return t + d * (n_particles - 1); }  // T = t + d(N-1)

  void validate() const {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("KrawtchoukContext: p in (0,1)");
    if (n_particles < 1 || d < 2 || t < 0) throw ValidationError("KrawtchoukContext: bad N/d/t");
    if (cap_t() < 1) throw ValidationError("KrawtchoukContext: T must be >= 1");
  }

  // standard Krawtchouk weight omega_T(z)
  double weight(long long z) const {
    if (z < 0 || z > cap_t()) throw ValidationError("KrawtchoukContext: weight needs 0 <= z <= T");
    return std::exp(double(cap_t()) * std::log1p(-p) +
                    double(z) * std::log(p / (1.0 - p)) + num::log_binomial(cap_t(), z));
  }
};

// K_n(x,p,T) = 2F1(-n,-x;-T;1/p), terminating sum
inline double kraw(int n, long long x, double p, int cap) {
  if (n < 0 || n > cap) throw ValidationError("kraw: need 0 <= n <= T");
  double term = 1.0, acc = 1.0;
  for (int j = 1; j <= n; ++j) {
    term *= double(-(n - j + 1)) * double(-(x - j + 1)) /
            (double(-(cap - j + 1)) * double(j) * p);
    acc += term;
  }
  return acc;
}

// generating-function contour: C(T,n) K_n(z,p,T)
inline double kraw_via_gf(int n, long long z, double p, int cap, double tol = 1e-12) {
  if (n < 0 || n > cap) throw ValidationError("kraw_via_gf: need 0 <= n <= T");
  const double q = (1.0 - p) / p;
  auto f = [&](num::cplx zeta) {
    const num::cplx lg = double(z) * std::log(1.0 - q * zeta) +
                         double(cap - z) * std::log(1.0 + zeta) -
                         double(n + 1) * std::log(zeta);
    return std::exp(lg);
  };
  // keep the (1 - q zeta) zero outside: radius < p/(1-p), also < 1. Among the
  // admissible radii take the one minimizing the integrand peak, and floor the
  // tolerance at the roundoff level of that peak so near-cancelling results
  // (e.g. exact zeros of the polynomial) do not stall the doubling loop.
  const double r_max = 0.95 * std::min(1.0, 1.0 / q);
  auto log_peak = [&](double r) {
    return double(z) * std::log1p(q * r) + double(cap - z) * std::log1p(r) -
           double(n + 1) * std::log(r);
  };
  double r = 0.5 * r_max, best = log_peak(r);
  for (int i = 1; i <= 60; ++i) {
    const double rr = r_max * i / 61.0;
    const double lp = log_peak(rr);
    if (lp < best) { best = lp; r = rr; }
  }
  const double tol_eff = std::max(tol, std::exp(best) * 1e-14);
  const auto res = num::contour_integral(f, {num::cplx{0, 0}, r, 64}, tol_eff);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return (res.value / num::cplx(0.0, two_pi)).real();
}

// Psi_k^N(z) in Krawtchouk form; equals the contour psi under
// z = x + d(N-1)
inline double psi_kraw(int k, long long z, const KrawtchoukContext& ctx) {
  ctx.validate();
  if (k < 0 || k > ctx.n_particles - 1)
    throw ValidationError("psi_kraw: need 0 <= k <= N-1");
  const long long arg = z - (long long)(ctx.d - 1) * k;
  if (arg < 0 || arg > ctx.t + k) return 0.0;
  const double lg = double(ctx.t) * std::log1p(-ctx.p) +
                    num::log_binomial(ctx.t + k, arg) +
                    double(arg) * std::log(ctx.p / (1.0 - ctx.p));
  return std::exp(lg) * kraw(k, arg, ctx.p, ctx.t + k);
}

// S matrix entries (d=2), 0 <= i,j <= N-1
inline la::Matrix s_matrix(const KrawtchoukContext& ctx) {
  ctx.validate();
  if (ctx.d != 2) throw ValidationError("s_matrix: explicit entries are for d=2");
  const int n = ctx.n_particles;
  if (n > 12) throw TooLarge("s_matrix: N <= 12");
  const double p = ctx.p;
  la::Matrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int lam = 0; lam <= j - i; ++lam) {
        const double c1 = num::binomial(i, lam);                  // C((d-1)i, lam), d=2
        const double c2 = num::binomial(2 * (n - 1 - i), j - i - lam);
        acc += c1 * c2 * std::pow((1.0 - p) / (-p), lam);
      }
      s(i, j) = std::pow(p / (1.0 - p), j) * std::pow(p, -i) * acc;
    }
  return s;
}

// explicit d=2 inverse, with A^{(j-i)}_{i,j} = i/(2j-i) (1 at i=j=0) and
// A^{(lam)}_{i,j} = 2 (j(N-1-i) - lam(N-1)) / ((j+lam)(2N-2-i-j-lam))
inline la::Matrix s_inverse_d2(const KrawtchoukContext& ctx) {
  ctx.validate();
  if (ctx.d != 2) throw ValidationError("s_inverse_d2: d must be 2");
  const int n = ctx.n_particles;
  if (n > 12) throw TooLarge("s_inverse_d2: N <= 12");
  const double p = ctx.p;
  la::Matrix si(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int lam = 0; lam <= j - i; ++lam) {
        double a;
        if (lam == j - i) {
          a = (i == 0 && j == 0) ? 1.0 : double(i) / double(2 * j - i);
        } else {
          a = 2.0 * (double(j) * (n - 1 - i) - double(lam) * (n - 1)) /
              (double(j + lam) * double(2 * n - 2 - i - j - lam));
        }
        const double c1 = num::binomial(2 * n - 2 - i - j - lam, j - i - lam);
        const double c2 = num::binomial(j + lam, lam);
        acc += std::pow((1.0 - p) / (-p), lam) * ((j - i) % 2 == 0 ? 1.0 : -1.0) * c1 * c2 * a;
      }
      si(i, j) = std::pow((1.0 - p) / p, i) * std::pow(p, j) * acc;
    }
  return si;
}

// closed d=2 contour formula for Phi_k^N; Phi_0 = 1 separately
inline double phi_kraw_d2(int k, long long z, const KrawtchoukContext& ctx,
                          double tol = 1e-12) {
  ctx.validate();
  if (ctx.d != 2) throw ValidationError("phi_kraw_d2: d must be 2");
  if (k < 0 || k > ctx.n_particles - 1)
    throw ValidationError("phi_kraw_d2: need 0 <= k <= N-1");
  if (k == 0) return 1.0;
  const double p = ctx.p;
  auto f = [&](num::cplx v) {
    const num::cplx lg = double(ctx.t + 2 * k - z - 1) * std::log(1.0 - p * v) +
                         double(z - k - 1) * std::log(1.0 + (1.0 - p) * v) -
                         double(k + 1) * std::log(v);
    return std::exp(lg) * (1.0 + (2.0 - p) * v);
  };
  const auto res = num::contour_integral(f, {num::cplx{0, 0}, 0.2, 64}, tol);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
  return sgn * (res.value / num::cplx(0.0, two_pi)).real();
}

}  // namespace tasep::kraw
