#pragma once

// Extended Airy_1 kernel, the GOE Tracy-Widom one-point law
// F_1(2s), and multi-time Airy_1 joint distributions by block Nystrom
// quadrature. P(cap A_1(u_k) <= s_k) = det(1 - chi_s K_F1 chi_s) with
// chi_s(u_k, x) = 1(x > s_k); each block is discretized with Gauss-Legendre
// nodes on [s_k, s_k + L] (the kernel decays superexponentially in s1+s2).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "airy.hpp"
#include "errors.hpp"
#include "gauss.hpp"
#include "linalg.hpp"

namespace tasep::airy {

struct Quadrature {
  int n_q = 60;
  double cutoff = 14.0;

  void validate() const {
    if (n_q < 10) throw ValidationError("Quadrature: n_q must be >= 10");
    if (!(cutoff > 0.0)) throw ValidationError("Quadrature: cutoff must be positive");
  }
};

struct Airy1Query {
  std::vector<double> times;   // u_1 < ... < u_m
  std::vector<double> levels;  // s_1 ... s_m
  Quadrature quad;

  void validate() const {
    if (times.empty() || times.size() != levels.size())
      throw ValidationError("Airy1Query: need equally many times and levels");
    for (std::size_t k = 1; k < times.size(); ++k)
      if (!(times[k] > times[k - 1]))
        throw ValidationError("Airy1Query: times must be strictly increasing");
    quad.validate();
  }
};

// reduces to Ai(s1+s2) at equal times, Gaussian term only for u2 > u1
inline double kernel_KF1(double u1, double s1, double u2, double s2) {
  const double du = u2 - u1;
  double gauss = 0.0;
  if (du > 0.0)
    gauss = -std::exp(-(s2 - s1) * (s2 - s1) / (4.0 * du)) /
            std::sqrt(4.0 * std::numbers::pi * du);
  const double arg = s1 + s2 + du * du;
  const double expo = du * (s1 + s2) + (2.0 / 3.0) * du * du * du;
  return gauss + airy_ai(arg) * std::exp(expo);
}

namespace detail {

// stabilizer conjugation rho(u_k, x) = (1+x^2)^{2k}; only used for m >= 2
inline double log_rho(int k, double x) { return 2.0 * k * std::log1p(x * x); }

inline double block_nystrom_det(const std::vector<double>& times,
                                const std::vector<double>& levels, int n_q, double cutoff) {
  const int m = int(times.size());
  const auto [xg, wg] = num::gauss_legendre(n_q);
  std::vector<double> nodes(std::size_t(m) * n_q), sqw(std::size_t(m) * n_q);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < n_q; ++i) {
      nodes[std::size_t(k) * n_q + i] = levels[std::size_t(k)] + cutoff * (xg[std::size_t(i)] + 1.0) / 2.0;
      sqw[std::size_t(k) * n_q + i] = std::sqrt(wg[std::size_t(i)] * cutoff / 2.0);
    }
  const int n = m * n_q;
  la::Matrix mat(n, n);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < n_q; ++i) {
      const int row = k * n_q + i;
      const double x = nodes[std::size_t(row)];
      for (int l = 0; l < m; ++l)
        for (int j = 0; j < n_q; ++j) {
          const int col = l * n_q + j;
          const double y = nodes[std::size_t(col)];
          double v = kernel_KF1(times[std::size_t(k)], x, times[std::size_t(l)], y);
          if (m >= 2)
            v *= std::exp(log_rho(k + 1, x) - log_rho(l + 1, y));
          mat(row, col) = v * sqw[std::size_t(row)] * sqw[std::size_t(col)];
        }
    }
  return la::det_lu([&] {
    la::Matrix b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = (i == j ? 1.0 : 0.0) - mat(i, j);
    return b;
  }());
}

}  // namespace detail

// P(A_1(0) <= s) = F_1(2s): one-block determinant of 1 - Ai(x+y) on (s, inf).
// Computed at (n_q, 2 n_q); the pair must agree to 1e-6.
inline double f1_point(double s, Quadrature quad = {}) {
  quad.validate();
  const double a = detail::block_nystrom_det({0.0}, {s}, quad.n_q, quad.cutoff);
  const double b = detail::block_nystrom_det({0.0}, {s}, 2 * quad.n_q, quad.cutoff);
  if (std::abs(a - b) > 1e-6)
    throw NonConvergence("f1_point: quadrature resolutions disagree");
  return b;
}

struct Airy1Report {
  double coarse = 0.0;
  double fine = 0.0;
  double delta = 0.0;
};

inline double joint_cdf_airy1(const Airy1Query& query, Airy1Report* report = nullptr) {
  query.validate();
  const double a =
      detail::block_nystrom_det(query.times, query.levels, query.quad.n_q, query.quad.cutoff);
  const double b = detail::block_nystrom_det(query.times, query.levels, 2 * query.quad.n_q,
                                             query.quad.cutoff);
  if (report) *report = {a, b, std::abs(a - b)};
  const double tol = query.times.size() >= 2 ? 1e-5 : 1e-6;
  if (std::abs(a - b) > tol)
    throw NonConvergence("joint_cdf_airy1: quadrature resolutions disagree");
  return b;
}

}  // namespace tasep::airy
