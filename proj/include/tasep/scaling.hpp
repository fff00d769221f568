#pragma once

// Scaling frame (characteristic speed, density, fluctuation coefficients)
// and the two finite-time-vs-limit
// comparisons: rescaled one-point/joint laws against the Airy_1 functionals,
// and the pointwise kernel limit along the characteristic.

#include <cmath>
#include <vector>

#include "airy1.hpp"
#include "errors.hpp"
#include "fredholm.hpp"
#include "kernel.hpp"

namespace tasep::scale {

struct ScalingFrame {
  double p = 0.5;
  int d = 2;
  double kappa = 0.0;
  double mu = 0.0;
  double speed = 0.0;
  double density = 0.0;
};

inline ScalingFrame constants(double p, int d) {
  sim::ModelParams{p, d, 0}.validate();
  ScalingFrame f;
  f.p = p;
  f.d = d;
  f.kappa = std::cbrt(2.0 * (1.0 - p) * p) * std::pow(double(d) * (d - 1), 2.0 / 3.0) / (d - p);
  f.mu = -2.0 * f.kappa * f.kappa / (d - 1);
  f.speed = p * (d - 1) / (d - p);
  f.density = 1.0 / d;
  return f;
}

// n(u,t) = floor(p(d-1)t/(d(d-p)) - (mu/d) u t^{2/3})
inline long long index_of(double u, long long t, const ScalingFrame& f) {
  const double tt = double(t);
  const double val = f.p * (f.d - 1) * tt / (f.d * (f.d - f.p)) -
                     f.mu / f.d * u * std::pow(tt, 2.0 / 3.0);
  const long long n = (long long)std::floor(val);
  if (n < 1) throw IndexOutOfRange("index_of: resulting particle index < 1");
  return n;
}

// x = floor(-2 kappa^2 r t^{2/3}/(d-1) - kappa s t^{1/3}),
//          n = floor(bulk + 2 kappa^2 r t^{2/3}/(d(d-1)))
inline std::pair<long long, long long> scaling_points(double r, double s, long long t,
                                                      const ScalingFrame& f) {
  const double tt = double(t);
  const double t23 = std::pow(tt, 2.0 / 3.0);
  const double t13 = std::cbrt(tt);
  const double k2 = f.kappa * f.kappa;
  const long long n = (long long)std::floor(
      f.p * (f.d - 1) * tt / (f.d * (f.d - f.p)) + 2.0 * k2 * r * t23 / (f.d * (f.d - 1)));
  const long long x =
      (long long)std::floor(-2.0 * k2 * r * t23 / (f.d - 1) - f.kappa * s * t13);
  if (n < 1) throw IndexOutOfRange("scaling_points: resulting particle index < 1");
  return {n, x};
}

// P(cap X_t(u_k) <= s_k) as a finite-time Fredholm determinant with
// indices n(u_k,t) and thresholds a_k = ceil(mu u_k t^{2/3} - kappa s_k t^{1/3})
// (the >= event in x is the <= event in X_t because of the -kappa t^{1/3} sign).
inline double rescaled_cdf(long long t, const std::vector<double>& u,
                           const std::vector<double>& s, double tol,
                           const ScalingFrame& f, fred::JointReport* report = nullptr) {
  if (t < 10) throw ValidationError("rescaled_cdf: t must be >= 10");
  if (u.empty() || u.size() != s.size())
    throw ValidationError("rescaled_cdf: need equally many times and levels");
  const double t23 = std::pow(double(t), 2.0 / 3.0);
  const double t13 = std::cbrt(double(t));
  JointQuery q;
  for (std::size_t k = 0; k < u.size(); ++k) {
    q.indices.push_back(int(index_of(u[k], t, f)));
    q.thresholds.push_back(
        (long long)std::ceil(f.mu * u[k] * t23 - f.kappa * s[k] * t13));
  }
  return fred::joint_cdf(q, {f.p, f.d, t}, tol, report);
}

// | kappa t^{1/3} K^conj(scaling points) - limit |, where the limit is the
// extended Airy_1 kernel with u -> r
inline double kernel_limit_error(long long t, double r1, double s1, double r2, double s2,
                                 const ScalingFrame& f) {
  const auto [n1, x1] = scaling_points(r1, s1, t, f);
  const auto [n2, x2] = scaling_points(r2, s2, t, f);
  fin::KernelPoint pt{int(n1), x1, int(n2), x2, {f.p, f.d, t}};
  const double finite = f.kappa * std::cbrt(double(t)) * fin::conjugate_kernel(pt);
  const double limit = airy::kernel_KF1(r1, s1, r2, s2);
  return std::abs(finite - limit);
}

}  // namespace tasep::scale
