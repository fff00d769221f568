#pragma once

// Airy function Ai. The Maclaurin pair is summed in double-double arithmetic:
// the two series suffer ~1e13x cancellation amplification near |x| = 8, which
// plain doubles cannot absorb, while double-double keeps ~32 digits through
// the cancellation. Beyond |x| = 8 the standard asymptotic expansions (with
// the exponential prefactor) take over; their optimal-truncation floor at the
// switch point is ~1e-13 relative.

#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace tasep::airy {

namespace dd {

struct Dd {
  double hi = 0.0, lo = 0.0;
};

inline Dd two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline Dd quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline Dd two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline Dd add(Dd a, Dd b) {
  Dd s = two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline Dd mul(Dd a, Dd b) {
  Dd p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline Dd mul(Dd a, double b) {
  Dd p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return quick_two_sum(p.hi, p.lo);
}

inline Dd div(Dd a, double b) {
  const double q1 = a.hi / b;
  Dd p = two_prod(q1, b);
  const double q2 = ((a.hi - p.hi) - p.lo + a.lo) / b;
  return quick_two_sum(q1, q2);
}

inline Dd from(double x) { return {x, 0.0}; }

}  // namespace dd

namespace detail {

// Ai(0) and Ai'(0) to double-double precision
inline constexpr double kAi0Hi = 0.3550280538878172;
inline constexpr double kAi0Lo = 2.05233632436212e-17;
inline constexpr double kAip0Hi = -0.2588194037928068;
inline constexpr double kAip0Lo = 2.522243111610832e-17;

inline double maclaurin(double x) {
  using dd::Dd;
  const Dd x3 = dd::mul(dd::mul(dd::from(x), dd::from(x)), dd::from(x));
  Dd tf = dd::from(1.0), tg = dd::from(x);
  Dd f = tf, g = tg;
  for (int k = 0; k < 200; ++k) {
    tf = dd::div(dd::mul(tf, x3), double(3 * k + 2) * double(3 * k + 3));
    tg = dd::div(dd::mul(tg, x3), double(3 * k + 3) * double(3 * k + 4));
    f = dd::add(f, tf);
    g = dd::add(g, tg);
    if (std::abs(tf.hi) < 1e-40 * (1.0 + std::abs(f.hi)) &&
        std::abs(tg.hi) < 1e-40 * (1.0 + std::abs(g.hi)))
      break;
  }
  const Dd a = dd::mul(f, Dd{kAi0Hi, kAi0Lo});
  const Dd b = dd::mul(g, Dd{kAip0Hi, kAip0Lo});
  return dd::add(a, b).hi;
}

// u_{k+1} = u_k (6k+1)(6k+3)(6k+5) / (216 (2k+1)(k+1))
inline double asymptotic_pos(double x) {
  const double zeta = (2.0 / 3.0) * x * std::sqrt(x);
  if (zeta > 745.0) return 0.0;  // below the double floor
  double u = 1.0, sum = 1.0, sgn = -1.0, last = 1.0;
  for (int k = 0; k < 60; ++k) {
    u *= double(6 * k + 1) * double(6 * k + 3) * double(6 * k + 5) /
         (216.0 * double(2 * k + 1) * double(k + 1));
    const double term = u / std::pow(zeta, k + 1);
    if (term > last) break;  // past optimal truncation
    sum += sgn * term;
    sgn = -sgn;
    last = term;
  }
  return std::exp(-zeta) * sum / (2.0 * std::sqrt(std::numbers::pi) * std::pow(x, 0.25));
}

inline double asymptotic_neg(double x) {
  const double z = -x;
  const double zeta = (2.0 / 3.0) * z * std::sqrt(z);
  double u = 1.0;
  double seven = 1.0, sodd = 0.0;
  double sgn_e = -1.0, sgn_o = 1.0;
  // u_k sequence, split into the even/odd sub-series of the expansion
  int parity = 0;
  double pw = 1.0, prev = 1e300;
  for (int k = 0; k < 60; ++k) {
    u *= double(6 * k + 1) * double(6 * k + 3) * double(6 * k + 5) /
         (216.0 * double(2 * k + 1) * double(k + 1));
    pw /= zeta;
    const double term = u * pw;
    if (term > prev) break;  // past optimal truncation
    prev = term;
    if (parity == 0) {
      sodd += sgn_o * term;
      sgn_o = -sgn_o;
    } else {
      seven += sgn_e * term;
      sgn_e = -sgn_e;
    }
    parity ^= 1;
  }
  const double ph = zeta + std::numbers::pi / 4.0;
  return (std::sin(ph) * seven - std::cos(ph) * sodd) /
         (std::sqrt(std::numbers::pi) * std::pow(z, 0.25));
}

}  // namespace detail

inline double airy_ai(double x) {
  if (std::abs(x) > 200.0) throw DomainTooLarge("airy_ai: |x| <= 200");
  if (x > 8.0) return detail::asymptotic_pos(x);
  if (x < -8.0) return detail::asymptotic_neg(x);
  return detail::maclaurin(x);
}

}  // namespace tasep::airy
