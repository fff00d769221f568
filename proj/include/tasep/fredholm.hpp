#pragma once

// Fredholm determinants over l^2({sigma(1)..sigma(m)} x Z) for the finite-time
// kernel. The truncated block matrix is assembled in rank-structured form:
// at a fixed set of contour nodes the conjugated kernel is
// Re( sum_j S[row,j] * B[col,j] ) with per-node row factors (summed over the
// d-1 nontrivial roots) and column factors, which is algebraically the same
// as per-entry quadrature at that node count but costs O(labels * nodes)
// exponentials plus one GEMM instead of O(labels^2 * nodes).

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"
#include "kernel.hpp"
#include "linalg.hpp"
#include "query.hpp"
#include "roots.hpp"

namespace tasep::fred {

using num::cplx;
using sim::ModelParams;

struct BlockLabel {
  int sigma;    // particle index
  long long x;  // lattice site
};

struct BlockKernelMatrix {
  std::vector<BlockLabel> labels;
  la::Matrix entries;
  int window = 0;
  double imag_residual = 0.0;
  int nodes = 0;
};

inline int assembly_nodes(long long t) {
  long long want = std::clamp<long long>(8 * t, 1024, 65536);
  int m = 1024;
  while (m < want) m *= 2;
  return m;
}

inline std::vector<BlockLabel> window_labels(const JointQuery& query, int w) {
  std::vector<BlockLabel> labels;
  labels.reserve(query.indices.size() * std::size_t(w));
  for (std::size_t k = 0; k < query.indices.size(); ++k) {
    const long long a = query.thresholds[k];
    for (int i = 0; i < w; ++i) {
      const long long x = (query.convention == EventConvention::GEQ_event)
                              ? a - w + i   // sites in [a-W, a)
                              : a + 1 + i;  // sites in (a, a+W]
      labels.push_back({query.indices[k], x});
    }
  }
  return labels;
}

inline BlockKernelMatrix assemble(const JointQuery& query, const ModelParams& params,
                                  int w, int nodes = 0) {
  params.validate();
  query.validate();
  if (w < 1) throw ValidationError("assemble: window must be >= 1");
  const int d = params.d;
  const double p = params.p;
  const double t = double(params.t);
  const int m = nodes > 0 ? nodes : assembly_nodes(params.t);
  const double r = (d == 2) ? 0.5 : 1.0 / (2.0 * d);

  auto labels = window_labels(query, w);
  const int nl = int(labels.size());

  double lref = 0.0;
  for (const auto& lab : labels) lref += fin::detail::conj_log_l(lab.x, lab.sigma, d);
  lref /= double(nl);

  std::vector<cplx> s_fac(std::size_t(nl) * m), b_fac(std::size_t(nl) * m);
  std::vector<cplx> us(d - 1);
  for (int j = 0; j < m; ++j) {
    const double th = 2.0 * std::numbers::pi * j / m;
    const cplx v = r * cplx(std::cos(th), std::sin(th));
    if (d == 2) {
      us[0] = -1.0 - v;
    } else {
      const auto rs = roots::offspring_roots(v, d);
      us = rs.nontrivial;
    }
    const cplx lvp = std::log(1.0 + p * v);
    const cplx l1v = std::log(1.0 + v);
    const cplx lmv = std::log(-v);
    std::vector<cplx> lup(us.size()), l1u(us.size()), lmu(us.size()), wu(us.size());
    for (std::size_t i = 0; i < us.size(); ++i) {
      lup[i] = std::log(1.0 + p * us[i]);
      l1u[i] = std::log(1.0 + us[i]);
      lmu[i] = std::log(-us[i]);
      wu[i] = 1.0 / (1.0 + double(d) * us[i]);
    }
    const cplx colw = (1.0 + double(d) * v) * v / double(m);
    for (int li = 0; li < nl; ++li) {
      const auto& lab = labels[std::size_t(li)];
      const double lshift = fin::detail::conj_log_l(lab.x, lab.sigma, d) - lref;
      cplx srow{0.0, 0.0};
      for (std::size_t i = 0; i < us.size(); ++i) {
        const cplx lg = t * lup[i] + double(lab.sigma) * lmu[i] -
                        double(lab.x + lab.sigma - 1) * l1u[i] - lshift;
        if (lg.real() > 700.0) throw NonConvergence("assemble: row factor overflow");
        srow += wu[i] * std::exp(lg);
      }
      s_fac[std::size_t(li) * m + j] = srow;
      const cplx lg = -t * lvp + double(lab.x + lab.sigma - 2) * l1v -
                      double(lab.sigma) * lmv + lshift;
      if (lg.real() > 700.0) throw NonConvergence("assemble: column factor overflow");
      b_fac[std::size_t(li) * m + j] = colw * std::exp(lg);
    }
  }

  BlockKernelMatrix out;
  out.window = w;
  out.nodes = m;
  out.entries = la::Matrix(nl, nl);
  double max_imag = 0.0;
  for (int a = 0; a < nl; ++a) {
    const cplx* sa = &s_fac[std::size_t(a) * m];
    for (int b = 0; b < nl; ++b) {
      const cplx* bb = &b_fac[std::size_t(b) * m];
      cplx acc{0.0, 0.0};
      for (int j = 0; j < m; ++j) acc += sa[j] * bb[j];
      const auto& la_ = labels[std::size_t(a)];
      const auto& lb_ = labels[std::size_t(b)];
      const double shift = fin::detail::conj_log_l(lb_.x, lb_.sigma, d) -
                           fin::detail::conj_log_l(la_.x, la_.sigma, d);
      const double lbinom =
          num::log_binomial(la_.x - lb_.x - 1, (long long)lb_.sigma - la_.sigma - 1);
      const double binom_conj = std::isinf(lbinom) ? 0.0 : std::exp(lbinom + shift);
      out.entries(a, b) = -binom_conj + acc.real();
      max_imag = std::max(max_imag, std::abs(acc.imag()) / (1.0 + std::abs(acc.real())));
    }
  }
  out.imag_residual = max_imag;
  out.labels = std::move(labels);
  return out;
}

inline double det_one_minus(const BlockKernelMatrix& m) {
  return la::det_one_minus(m.entries);
}

struct JointReport {
  int window = 0;
  int nodes = 0;
  double imag_residual = 0.0;
  double last_delta = 0.0;
  bool clipped = false;
};

// P(cap x_sigma(k) >= a_k) (GEQ convention) as det(1 - chi K chi), window
// doubled until successive determinants settle
inline double joint_cdf(const JointQuery& query, const ModelParams& params, double tol,
                        JointReport* report = nullptr, int w_cap = 4096) {
  if (!(tol > 0.0)) throw ValidationError("joint_cdf: tol must be positive");
  double prev = 0.0;
  bool have_prev = false;
  for (int w = 16; w <= w_cap; w *= 2) {
    const auto mat = assemble(query, params, w);
    const double det = det_one_minus(mat);
    if (have_prev && std::abs(det - prev) < tol) {
      double val = det;
      bool clipped = false;
      if (val < 0.0 && val > -tol) { val = 0.0; clipped = true; }
      if (val > 1.0 && val < 1.0 + tol) { val = 1.0; clipped = true; }
      if (report)
        *report = {w, mat.nodes, mat.imag_residual, std::abs(det - prev), clipped};
      return val;
    }
    prev = det;
    have_prev = true;
  }
  throw NonConvergence("joint_cdf: window cap exceeded");
}

}  // namespace tasep::fred
