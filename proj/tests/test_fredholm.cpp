#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tasep/fredholm.hpp"
#include "tasep/kernel.hpp"
#include "tasep/simulate.hpp"

using namespace tasep;
using sim::ModelParams;

TEST_CASE("det_lu / det_one_minus: direct oracles") {
  CHECK(la::det_lu(la::Matrix(0, 0)) == Catch::Approx(1.0).margin(1e-15));
  la::Matrix diag(2, 2);
  diag(0, 0) = 0.5;
  diag(1, 1) = 0.5;
  CHECK(la::det_lu(diag) == Catch::Approx(0.25).epsilon(1e-14));
  CHECK(la::det_one_minus(diag) == Catch::Approx(0.25).epsilon(1e-14));
}

namespace {
double det_cofactor(const la::Matrix& m) {
  if (m.rows == 1) return m(0, 0);
  double acc = 0.0;
  for (int j = 0; j < m.cols; ++j) {
    la::Matrix minor(m.rows - 1, m.cols - 1);
    for (int i = 1; i < m.rows; ++i)
      for (int k = 0, c = 0; k < m.cols; ++k)
        if (k != j) minor(i - 1, c++) = m(i, k);
    acc += (j % 2 == 0 ? 1.0 : -1.0) * m(0, j) * det_cofactor(minor);
  }
  return acc;
}
}  // namespace

TEST_CASE("det_lu: random 5x5 against cofactor expansion") {
  num::SeededRng rng(2024, 0);
  for (int rep = 0; rep < 5; ++rep) {
    la::Matrix m(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) m(i, j) = 2.0 * rng.uniform() - 1.0;
    const double expect = det_cofactor(m);
    CHECK(la::det_lu(m) == Catch::Approx(expect).margin(1e-12).epsilon(1e-12));
  }
}

TEST_CASE("window_labels: GEQ window sits strictly below the threshold") {
  const JointQuery q{{2, 5}, {3, -1}};
  const auto labels = fred::window_labels(q, 4);
  REQUIRE(labels.size() == 8);
  CHECK(labels[0].sigma == 2);
  CHECK(labels[0].x == -1);  // a - W
  CHECK(labels[3].x == 2);   // a - 1
  CHECK(labels[4].sigma == 5);
  CHECK(labels[4].x == -5);
}

TEST_CASE("assemble: finite real entries matching the conjugate kernel") {
  const ModelParams params{0.5, 2, 4};
  const JointQuery q{{1, 2}, {2, 0}};
  const auto mat = fred::assemble(q, params, 6);
  REQUIRE(mat.entries.rows == 12);
  CHECK(mat.imag_residual < 1e-10);
  // rank-structured assembly equals per-entry contour evaluation
  for (int a = 0; a < mat.entries.rows; a += 5)
    for (int b = 0; b < mat.entries.cols; b += 3) {
      const auto& la_ = mat.labels[std::size_t(a)];
      const auto& lb_ = mat.labels[std::size_t(b)];
      const fin::KernelPoint pt{la_.sigma, la_.x, lb_.sigma, lb_.x, params};
      CHECK(mat.entries(a, b) ==
            Catch::Approx(fin::conjugate_kernel(pt)).margin(1e-12).epsilon(1e-9));
    }
}

TEST_CASE("joint_cdf matches exact enumeration (one particle)") {
  for (double p : {0.4, 0.6})
    for (long long t : {1LL, 3LL, 5LL})
      for (long long a = -1; a <= t + 1; ++a) {
        const ModelParams params{p, 2, t};
        const JointQuery q{{1}, {a}};
        const double exact = sim::enumerate_exact(params, q);
        const double fredholm = fred::joint_cdf(q, params, 1e-10);
        CHECK(fredholm == Catch::Approx(exact).margin(1e-8));
      }
}

TEST_CASE("joint_cdf matches exact enumeration (joint, d = 2 and 3)") {
  for (int d : {2, 3}) {
    const ModelParams params{0.5, d, 3};
    for (long long a1 : {0LL, 1LL, 2LL})
      for (long long a2 : {-(long long)d, -(long long)d + 1, -(long long)d + 2}) {
        const JointQuery q{{1, 2}, {a1, a2}};
        const double exact = sim::enumerate_exact(params, q);
        const double fredholm = fred::joint_cdf(q, params, 1e-10);
        CHECK(fredholm == Catch::Approx(exact).margin(1e-8));
      }
  }
}

TEST_CASE("joint_cdf: thresholds at the initial condition give probability 1") {
  for (int d : {2, 3}) {
    const ModelParams params{0.45, d, 4};
    const JointQuery q{{1, 3}, {0, -2LL * d}};
    CHECK(fred::joint_cdf(q, params, 1e-9) == Catch::Approx(1.0).margin(1e-8));
  }
}

TEST_CASE("joint_cdf: monotone decreasing in the threshold") {
  const ModelParams params{0.5, 2, 8};
  double prev = 1.1;
  for (long long a = -1; a <= 6; ++a) {
    const double v = fred::joint_cdf({{2}, {a - 2}}, params, 1e-9);
    CHECK(v <= prev + 1e-9);
    CHECK(v >= -1e-12);
    CHECK(v <= 1.0 + 1e-12);
    prev = v;
  }
}

TEST_CASE("joint_cdf: marginal consistency when one threshold is vacuous") {
  // a_2 far below anything particle 2 can reach makes the joint the marginal
  const ModelParams params{0.5, 2, 6};
  const double marginal = fred::joint_cdf({{1}, {2}}, params, 1e-9);
  const double joint = fred::joint_cdf({{1, 2}, {2, -2}}, params, 1e-9);
  CHECK(joint == Catch::Approx(marginal).margin(1e-8));
}

TEST_CASE("joint_cdf: window doubling has converged") {
  const ModelParams params{0.5, 2, 6};
  const JointQuery q{{1, 2}, {3, 0}};
  fred::JointReport rep;
  const double v = fred::joint_cdf(q, params, 1e-10, &rep);
  CHECK(rep.last_delta < 1e-10);
  const auto wide = fred::assemble(q, params, 2 * rep.window);
  CHECK(fred::det_one_minus(wide) == Catch::Approx(v).margin(1e-9));
}

TEST_CASE("assembly_nodes: clamped powers of two") {
  CHECK(fred::assembly_nodes(1) == 1024);
  CHECK(fred::assembly_nodes(200) == 2048);
  CHECK(fred::assembly_nodes(128) == 1024);
  CHECK(fred::assembly_nodes(100000) == 65536);
}

TEST_CASE("joint_cdf: validation") {
  const ModelParams params{0.5, 2, 3};
  CHECK_THROWS_AS(fred::joint_cdf({{2, 1}, {0, 0}}, params, 1e-9), ValidationError);
  CHECK_THROWS_AS(fred::joint_cdf({{1}, {0}}, params, -1.0), ValidationError);
  CHECK_THROWS_AS(fred::assemble({{1}, {0}}, params, 0), ValidationError);
}
