#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tasep/kernel.hpp"
#include "tasep/linalg.hpp"
#include "tasep/simulate.hpp"

using namespace tasep;
using sim::ModelParams;

TEST_CASE("f_n: F_0 is the one-particle binomial law") {
  // F_0(x,t) = (1-p)^t (p/(1-p))^x C(t,x)
  const ModelParams params{0.5, 2, 2};
  CHECK(fin::f_n(0, 0, params) == Catch::Approx(0.25).epsilon(1e-12));
  CHECK(fin::f_n(0, 1, params) == Catch::Approx(0.50).epsilon(1e-12));
  CHECK(fin::f_n(0, 2, params) == Catch::Approx(0.25).epsilon(1e-12));
  CHECK(fin::f_n(0, -1, params) == Catch::Approx(0.0).margin(1e-14));
  CHECK(fin::f_n(0, 3, params) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("f_n: closed form against direct binomial, several parameters") {
  for (double p : {0.3, 0.7})
    for (long long t : {1LL, 5LL, 12LL})
      for (long long x = 0; x <= t; ++x) {
        const double expect = std::exp(double(t) * std::log1p(-p) +
                                       double(x) * std::log(p / (1.0 - p)) +
                                       num::log_binomial(t, x));
        CHECK(fin::f_n(0, x, {p, 2, t}) ==
              Catch::Approx(expect).margin(1e-13).epsilon(1e-9));
      }
}

TEST_CASE("f_n: boundary relation F_{n-1}(x) = F_n(x) - F_n(x+1)") {
  for (double p : {0.4, 0.7})
    for (long long t : {3LL, 10LL, 20LL})
      for (int n : {-2, -1, 0, 1, 2, 3})
        for (long long x = -3; x <= t + 3; ++x) {
          const ModelParams params{p, 2, t};
          const double lhs = fin::f_n(n - 1, x, params);
          const double rhs = fin::f_n(n, x, params) - fin::f_n(n, x + 1, params);
          CHECK(lhs == Catch::Approx(rhs).margin(1e-12).epsilon(1e-10));
        }
}

TEST_CASE("f_n: master equation in t") {
  for (double p : {0.4, 0.7})
    for (long long t : {2LL, 8LL, 19LL})
      for (int n : {-1, 0, 1, 2})
        for (long long x = -2; x <= t + 2; ++x) {
          const double lhs = fin::f_n(n, x, {p, 2, t + 1});
          const double rhs =
              (1.0 - p) * fin::f_n(n, x, {p, 2, t}) + p * fin::f_n(n, x - 1, {p, 2, t});
          CHECK(lhs == Catch::Approx(rhs).margin(1e-12).epsilon(1e-10));
        }
}

TEST_CASE("green_function: N = 1 equals the binomial transition weight") {
  const ModelParams params{0.6, 2, 4};
  for (long long x = 0; x <= 4; ++x) {
    const double expect = std::exp(4.0 * std::log1p(-0.6) + double(x) * std::log(0.6 / 0.4) +
                                   num::log_binomial(4, x));
    CHECK(fin::green_function({0}, {x}, params) == Catch::Approx(expect).epsilon(1e-11));
  }
}

TEST_CASE("green_function: N = 2 against branch enumeration") {
  const ModelParams params{0.5, 2, 3};
  const auto dist = sim::enumerate_dist({0, -2}, params.t, params.p);
  for (const auto& [cfg, w] : dist) {
    const double g = fin::green_function({0, -2}, {cfg[0], cfg[1]}, params);
    CHECK(g == Catch::Approx(w).margin(1e-12).epsilon(1e-10));
  }
  // impossible transitions vanish
  CHECK(fin::green_function({0, -2}, {5, -2}, params) == Catch::Approx(0.0).margin(1e-13));
  CHECK(fin::green_function({0, -2}, {0, -3}, params) == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("psi: k = 0 reduces to F_0 in the shifted variable") {
  for (int d : {2, 3})
    for (int n : {1, 2, 4}) {
      const ModelParams params{0.5, d, 6};
      for (long long x = -d * (n - 1) - 2; x <= 8; ++x) {
        const long long z = x + (long long)d * (n - 1);
        const double expect = (z < 0) ? 0.0 : fin::f_n(0, z, {params.p, params.d, params.t});
        CHECK(fin::psi(n, 0, x, params) == Catch::Approx(expect).margin(1e-13).epsilon(1e-10));
      }
    }
}

TEST_CASE("psi: sum over positions is delta_{k,0} for k >= 0") {
  // for k >= 0 the integrand is w^{-(z+1)} times a polynomial, so the sum of
  // all coefficients is the polynomial at w = 1, where (w-1)^k kills k >= 1
  for (int d : {2, 3}) {
    const ModelParams params{0.45, d, 7};
    const int n = 3;
    for (int k = 0; k <= 2; ++k) {
      double acc = 0.0;
      for (long long z = 0; z <= params.t + (long long)d * (k + 1) + 4; ++z)
        acc += fin::psi(n, k, z - (long long)d * (n - 1), params);
      CHECK(acc == Catch::Approx(k == 0 ? 1.0 : 0.0).margin(1e-9));
    }
  }
}

TEST_CASE("phi: k = 0 is identically 1 and degree matches k") {
  const ModelParams params{0.5, 2, 6};
  CHECK(fin::phi(3, 0, -57, params) == 1.0);
  // k-th finite difference of a degree-k polynomial is constant, (k+1)-th zero
  for (int k : {1, 2}) {
    const int n = 4;
    std::vector<double> vals;
    for (long long x = 0; x <= k + 3; ++x) vals.push_back(fin::phi(n, k, x, params));
    for (int diff = 0; diff < k + 1; ++diff)
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) vals[i] = vals[i + 1] - vals[i];
    for (std::size_t i = 0; i + std::size_t(k) + 1 < vals.size(); ++i)
      CHECK(vals[i] == Catch::Approx(0.0).margin(1e-7));
  }
}

TEST_CASE("psi/phi: biorthogonality") {
  for (int d : {2, 3})
    for (double p : {0.4, 0.6}) {
      const ModelParams params{p, d, 8};
      const int n = 4;
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (long long z = 0; z <= params.t + (long long)d * n; ++z)
            acc += fin::psi(n, k, z - (long long)d * (n - 1), params) *
                   fin::phi(n, j, z - (long long)d * (n - 1), params);
          CHECK(acc == Catch::Approx(k == j ? 1.0 : 0.0).margin(1e-10));
        }
    }
}

TEST_CASE("psi: composition rule sum_{y<x} Psi^{n+1}_{n+1-j}(y) = Psi^n_{n-j}(x)") {
  for (int d : {2, 3})
    for (double p : {0.3, 0.6}) {
      const ModelParams params{p, d, 6};
      for (int n : {1, 3})
        for (int j = 0; j <= n + 2; ++j)  // j > n exercises the negative-index extension
          for (long long x = -(long long)d * (n - 1) - 1; x <= params.t + 2; ++x) {
            double lhs = 0.0;
            for (long long y = -(long long)d * (n + 3); y < x; ++y)
              lhs += fin::psi(n + 1, n + 1 - j, y, params);
            const double rhs = fin::psi(n, n - j, x, params);
            CHECK(lhs == Catch::Approx(rhs).margin(1e-10));
          }
    }
}

TEST_CASE("kernel_K agrees with the d=2 single-contour specialization") {
  for (double p : {0.3, 0.5, 0.8})
    for (long long t : {1LL, 4LL, 9LL})
      for (auto [n1, x1, n2, x2] : {std::tuple{1, 0LL, 1, 1LL},
                                    {1, 2LL, 2, -1LL},
                                    {2, -2LL, 1, 0LL},
                                    {3, 1LL, 3, -3LL},
                                    {2, 0LL, 4, -5LL}}) {
        const fin::KernelPoint pt{n1, x1, n2, x2, {p, 2, t}};
        const double a = fin::kernel_K(pt);
        const double b = fin::kernel_K_d2(pt);
        CHECK(a == Catch::Approx(b).margin(1e-11).epsilon(1e-9));
      }
}

TEST_CASE("extended finite-N kernel reproduces joint laws of the N-particle system") {
  // The finite-N kernel governs the pure d-periodic system with N particles
  // and no right guards; its gap determinants over windows [a-W, a) must
  // reproduce P(x_{n1} >= a_1, x_{n2} >= a_2) from exact branch enumeration.
  // This pins down both the diagonal (projection) blocks and the off-diagonal
  // blocks built from the negative-index psi extension.
  for (int d : {2, 3})
    for (long long t : {2LL, 4LL}) {
      const double p = 0.45;
      const sim::ModelParams params{p, d, t};
      const int n_total = 5;
      std::vector<long long> init;
      for (int k = 0; k < n_total; ++k) init.push_back(-(long long)d * k);
      const auto dist = sim::enumerate_dist(init, t, p);
      const int w = 2 * int(t) + 3 * d + 6;
      for (auto [n1, a1, n2, a2] : {std::tuple{1, 1LL, 1, 1LL},
                                    {2, 0LL, 2, 0LL},
                                    {1, 1LL, 2, -1LL},
                                    {1, 2LL, 3, -d - 1LL},
                                    {2, -1LL, 3, -d + 0LL}}) {
        double exact = 0.0;
        for (const auto& [cfg, wt] : dist)
          if (cfg[n1 - 1] >= a1 && (n2 == n1 || cfg[n2 - 1] >= a2)) exact += wt;

        struct Site { int n; long long x; };
        std::vector<Site> sites;
        for (long long x = a1 - w; x < a1; ++x) sites.push_back({n1, x});
        if (n2 != n1)
          for (long long x = a2 - w; x < a2; ++x) sites.push_back({n2, x});
        la::Matrix m(int(sites.size()), int(sites.size()));
        for (std::size_t i = 0; i < sites.size(); ++i)
          for (std::size_t j = 0; j < sites.size(); ++j)
            m(int(i), int(j)) = fin::kernel_extended_finite(
                {sites[i].n, sites[i].x, sites[j].n, sites[j].x, params});
        CHECK(la::det_one_minus(m) == Catch::Approx(exact).margin(1e-10));
      }
    }
}

TEST_CASE("kernel_K: invariance under (x,n) -> (x - dS, n + S)") {
  for (int d : {2, 3})
    for (int shift : {1, 2, 5}) {
      const fin::KernelPoint base{2, 1, 3, -2, {0.5, d, 5}};
      fin::KernelPoint moved = base;
      moved.n1 += shift;
      moved.n2 += shift;
      moved.x1 -= (long long)d * shift;
      moved.x2 -= (long long)d * shift;
      const double a = fin::kernel_K(base);
      const double b = fin::kernel_K(moved);
      CHECK(a == Catch::Approx(b).margin(1e-11).epsilon(1e-9));
    }
}

TEST_CASE("conjugate_kernel: equals kernel_K when the conjugation is trivial") {
  // equal (x,n) endpoints make the conjugation factor exactly 1
  for (int d : {2, 3}) {
    const fin::KernelPoint pt{2, -1, 2, -1, {0.55, d, 6}};
    CHECK(fin::conjugate_kernel(pt) == Catch::Approx(fin::kernel_K(pt)).epsilon(1e-10));
  }
}

TEST_CASE("conjugate_kernel: 2x2 correlation determinant is conjugation invariant") {
  const ModelParams params{0.5, 2, 6};
  const fin::KernelPoint k11{1, 1, 1, 1, params}, k12{1, 1, 2, -1, params};
  const fin::KernelPoint k21{2, -1, 1, 1, params}, k22{2, -1, 2, -1, params};
  const double det_plain = fin::kernel_K(k11) * fin::kernel_K(k22) -
                           fin::kernel_K(k12) * fin::kernel_K(k21);
  const double det_conj = fin::conjugate_kernel(k11) * fin::conjugate_kernel(k22) -
                          fin::conjugate_kernel(k12) * fin::conjugate_kernel(k21);
  CHECK(det_conj == Catch::Approx(det_plain).margin(1e-12).epsilon(1e-9));
}

TEST_CASE("conjugate_kernel: bounded along a scaling ray where kernel_K blows up") {
  // t = 256, d = 2, p = 0.5: points near the characteristic
  const ModelParams params{0.5, 2, 256};
  const int n = 42;  // ~ p(d-1)t/(d(d-p)) = t/6
  const long long x = -22;
  const fin::KernelPoint pt{n, x + 3, n + 2, x - 4, params};
  fin::EvalReport rep;
  const double v = fin::conjugate_kernel(pt, &rep);
  CHECK(std::isfinite(v));
  CHECK(std::abs(v) < 10.0);
  CHECK(rep.nodes_used >= 256);
}

TEST_CASE("kernel evaluation: validation and report") {
  CHECK_THROWS_AS(fin::kernel_K({0, 0, 1, 0, {0.5, 2, 3}}), ValidationError);
  CHECK_THROWS_AS(fin::kernel_K_d2({1, 0, 1, 0, {0.5, 3, 3}}), ValidationError);
  fin::EvalReport rep;
  fin::kernel_K({1, 0, 1, 0, {0.5, 2, 3}}, &rep);
  CHECK(rep.nodes_used >= 256);
  CHECK(rep.imag_residual < 1e-10);
}
