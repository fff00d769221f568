#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "tasep/contour.hpp"
#include "tasep/logbinom.hpp"
#include "tasep/rng.hpp"

using namespace tasep;
using num::cplx;

static const cplx kTwoPiI{0.0, 2.0 * std::numbers::pi};

TEST_CASE("contour_nodes: 8 equispaced unit-circle nodes") {
  const auto nodes = num::contour_nodes({cplx{0, 0}, 1.0, 8});
  REQUIRE(nodes.size() == 8);
  for (int j = 0; j < 8; ++j) {
    const double th = 2.0 * std::numbers::pi * j / 8.0;
    CHECK(std::abs(nodes[std::size_t(j)].node - cplx(std::cos(th), std::sin(th))) < 1e-15);
  }
  // anticlockwise: second node in the upper half plane
  CHECK(nodes[1].node.imag() > 0.0);
}

TEST_CASE("contour_nodes: residue and analytic oracles") {
  auto quad = [](auto f, num::ComplexContour c) {
    cplx acc{0, 0};
    for (const auto& [node, weight] : num::contour_nodes(c)) acc += weight * f(node);
    return acc;
  };
  CHECK(std::abs(quad([](cplx v) { return 1.0 / v; }, {cplx{0, 0}, 0.5, 16}) - kTwoPiI) < 1e-12);
  CHECK(std::abs(quad([](cplx v) { return v; }, {cplx{0.3, 0.1}, 0.7, 16})) < 1e-12);
}

TEST_CASE("contour_integral: residue oracles") {
  const auto r1 = num::contour_integral([](cplx v) { return 1.0 / v; },
                                        {cplx{0, 0}, 0.5, 64}, 1e-13);
  CHECK(std::abs(r1.value - kTwoPiI) < 1e-12);

  // exp(v)/v^2 has residue 1 at 0
  const auto r2 = num::contour_integral([](cplx v) { return std::exp(v) / (v * v); },
                                        {cplx{0, 0}, 1.0, 64}, 1e-13);
  CHECK(std::abs(r2.value - kTwoPiI) < 1e-11);

  const auto r3 = num::contour_integral([](cplx v) { return v * v * v; },
                                        {cplx{0, 0}, 1.0, 64}, 1e-13);
  CHECK(std::abs(r3.value) < 1e-12);
}

TEST_CASE("contour_integral: geometric convergence under node doubling") {
  // f(v) = 1/(v-2) on the unit circle: integral 0, trapezoid error ~ 2^-m
  auto f = [](cplx v) { return 1.0 / (v - 2.0); };
  std::vector<double> errs;
  for (int m : {16, 32, 64}) {
    cplx acc{0, 0};
    for (const auto& [node, weight] : num::contour_nodes({cplx{0, 0}, 1.0, m}))
      acc += weight * f(node);
    errs.push_back(std::abs(acc));
  }
  REQUIRE(errs[0] > 0.0);
  // error(2m) ~ error(m)^2 behavior: squaring-type collapse
  CHECK(errs[1] < 10.0 * errs[0] * errs[0]);
  CHECK(errs[2] < 1e-15);
}

TEST_CASE("contour_integral: cap exceeded throws") {
  // 1/(v - 1.0000001) just outside the contour stalls at low node counts
  auto f = [](cplx v) { return 1.0 / (v - 1.0000001); };
  CHECK_THROWS_AS(num::contour_integral(f, {cplx{0, 0}, 1.0, 64}, 1e-15, 256),
                  NonConvergence);
}

TEST_CASE("log_binomial: values and conventions") {
  CHECK(num::log_binomial(5, 2) == Catch::Approx(std::log(10.0)).epsilon(1e-14));
  CHECK(std::isinf(num::log_binomial(7, -1)));
  CHECK(num::log_binomial(7, -1) < 0.0);
  CHECK(std::isinf(num::log_binomial(3, 5)));
  CHECK(num::log_binomial(0, 0) == 0.0);
  CHECK(num::binomial(3, 5) == 0.0);
  // large arguments stay finite
  CHECK(std::isfinite(num::log_binomial(10'000'000, 5'000'000)));
}

TEST_CASE("log_binomial: Pascal identity against exact integers") {
  // exact Pascal triangle in unsigned __int128
  std::vector<std::vector<unsigned long long>> c(61);
  for (int a = 0; a <= 60; ++a) {
    c[std::size_t(a)].resize(std::size_t(a) + 1);
    c[std::size_t(a)][0] = c[std::size_t(a)][std::size_t(a)] = 1;
    for (int b = 1; b < a; ++b)
      c[std::size_t(a)][std::size_t(b)] =
          c[std::size_t(a - 1)][std::size_t(b - 1)] + c[std::size_t(a - 1)][std::size_t(b)];
  }
  for (int a = 1; a <= 60; ++a)
    for (int b = 0; b <= a; ++b) {
      const double approx = std::exp(num::log_binomial(a, b));
      const double exact = double(c[std::size_t(a)][std::size_t(b)]);
      CHECK(approx == Catch::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("rng: determinism and stream independence") {
  num::SeededRng a(1234, 7), b(1234, 7);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());

  num::SeededRng s0(42, 0), s1(42, 1);
  const int n = 100'000;
  double sum0 = 0, sum1 = 0, sum00 = 0, sum11 = 0, sum01 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s0.uniform(), y = s1.uniform();
    sum0 += x;
    sum1 += y;
    sum00 += x * x;
    sum11 += y * y;
    sum01 += x * y;
  }
  const double m0 = sum0 / n, m1 = sum1 / n;
  const double cov = sum01 / n - m0 * m1;
  const double v0 = sum00 / n - m0 * m0, v1 = sum11 / n - m1 * m1;
  CHECK(std::abs(cov / std::sqrt(v0 * v1)) < 0.01);
}

TEST_CASE("rng: uniform mean") {
  num::SeededRng r(987654321, 3);
  const int n = 1'000'000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += r.uniform();
  CHECK(sum / n == Catch::Approx(0.5).margin(0.002));
}
