#pragma once

// Discrete-time TASEP with sequential update: at every time step particles are
// processed from right to left, and a particle jumps one site to the right
// with probability p when the target site is free *after* the particles ahead
// of it have moved, so blocks of adjacent particles can move together.
//
// The exact kernel describes the fully occupied sublattice dZ, i.e. the
// initial condition x_k(0) = -d(k-1) for all k in Z, including particles to
// the right of the origin. A finite system reproduces the law of particles
// 1..N exactly when it carries floor((t-1)/(d-1)) "guard" particles on the
// right: guard j starts at d*j, and its absence can first be felt by guard
// j-1 once that one has advanced d-1 sites, so the influence front needs
// j*(d-1) steps to cross j gaps -- guard j matters exactly when j*(d-1) < t.
// init_periodic is the left-filled variant (no particles right of the origin);
// everything compared against the kernel uses the guarded system.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "query.hpp"
#include "rng.hpp"

namespace tasep::sim {

struct ModelParams {
  double p = 0.5;
  int d = 2;
  long long t = 0;

  void validate() const {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("ModelParams: p must be in (0,1)");
    if (d < 2) throw ValidationError("ModelParams: d must be >= 2");
    if (t < 0) throw ValidationError("ModelParams: t must be >= 0");
  }
};

struct ParticleSystem {
  // positions[0] is the rightmost particle; strictly decreasing
  std::vector<long long> positions;
  long long time = 0;
  int guard_count = 0;          // leading entries that are guards (index <= 0)
  long long origin_crossings = 0;  // jumps from site -1 to site 0 (N_t anchor)

  void check_ordering() const {
    for (std::size_t i = 1; i < positions.size(); ++i)
      if (positions[i] >= positions[i - 1])
        throw ValidationError("ParticleSystem: exclusion/ordering violated");
  }

  // array index of the particle with 1-based label k
  std::size_t slot(int k) const { return std::size_t(guard_count + k - 1); }
};

inline ParticleSystem init_periodic(int d, int n) {
  if (n < 1) throw ValidationError("init_periodic: N must be >= 1");
  if (d < 2) throw ValidationError("init_periodic: d must be >= 2");
  ParticleSystem s;
  s.positions.resize(n);
  for (int k = 0; k < n; ++k) s.positions[k] = -(long long)d * k;
  return s;
}

inline ParticleSystem init_periodic_guarded(int d, int n, long long t) {
  ParticleSystem s = init_periodic(d, n);
  const int g = (t < 1) ? 0 : int((t - 1) / (d - 1));
  s.guard_count = g;
  s.positions.insert(s.positions.begin(), g, 0);
  for (int j = 0; j < g; ++j) s.positions[j] = (long long)d * (g - j);
  return s;
}

inline void step(ParticleSystem& s, double p, num::SeededRng& rng) {
  const std::size_t n = s.positions.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && s.positions[i - 1] == s.positions[i] + 1) continue;  // blocked
    if (rng.uniform() < p) {
      if (s.positions[i] == -1) ++s.origin_crossings;
      ++s.positions[i];
    }
  }
  ++s.time;
}

// Left-filled simulation of one trajectory; returns label -> position at time t.
inline std::map<int, long long> simulate(const ModelParams& params, int n,
                                         std::uint64_t seed,
                                         const std::set<int>& observe) {
  params.validate();
  if (!observe.empty() && *observe.rbegin() > n)
    throw InsufficientParticles("simulate: N < max(observe)");
  ParticleSystem s = init_periodic(params.d, n);
  num::SeededRng rng(seed, 0);
  for (long long k = 0; k < params.t; ++k) step(s, params.p, rng);
  std::map<int, long long> out;
  for (int idx : observe) out[idx] = s.positions[s.slot(idx)];
  return out;
}

// Many trajectories of the guarded (or left-filled) system; per-sample RNG
// streams, so the result is independent of the thread partition.
inline std::vector<std::vector<long long>> sample_positions(
    const ModelParams& params, const std::vector<int>& observe, int n_samples,
    std::uint64_t seed, bool guarded = true, int threads = 1) {
  params.validate();
  int n_bulk = 0;
  for (int idx : observe) {
    if (idx < 1) throw ValidationError("sample_positions: particle labels are >= 1");
    n_bulk = std::max(n_bulk, idx);
  }
  std::vector<std::vector<long long>> out(n_samples);
  auto run_range = [&](int lo, int hi) {
    for (int sidx = lo; sidx < hi; ++sidx) {
      ParticleSystem s = guarded ? init_periodic_guarded(params.d, n_bulk, params.t)
                                 : init_periodic(params.d, n_bulk);
      num::SeededRng rng(seed, std::uint64_t(sidx) + 1);
      for (long long k = 0; k < params.t; ++k) step(s, params.p, rng);
      auto& rec = out[sidx];
      rec.reserve(observe.size());
      for (int idx : observe) rec.push_back(s.positions[s.slot(idx)]);
    }
  };
  threads = std::max(1, threads);
  if (threads == 1 || n_samples < 2 * threads) {
    run_range(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_samples + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const int lo = w * chunk, hi = std::min(n_samples, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

// Exact joint law of a small system by expanding every per-step branch with
// its update weight. Guards included by default so the result is the law the
// kernel describes.
inline std::map<std::vector<long long>, double> enumerate_dist(
    std::vector<long long> init, long long t, double p) {
  std::map<std::vector<long long>, double> dist;
  dist[std::move(init)] = 1.0;
  for (long long stepi = 0; stepi < t; ++stepi) {
    std::map<std::vector<long long>, double> next;
    for (const auto& [cfg, w] : dist) {
      std::vector<std::pair<std::vector<long long>, double>> outs{{cfg, w}};
      for (std::size_t i = 0; i < cfg.size(); ++i) {
        std::vector<std::pair<std::vector<long long>, double>> grown;
        grown.reserve(outs.size() * 2);
        for (auto& [pos, ww] : outs) {
          if (i > 0 && pos[i - 1] == pos[i] + 1) {
            grown.emplace_back(std::move(pos), ww);
          } else {
            auto jumped = pos;
            ++jumped[i];
            grown.emplace_back(std::move(jumped), ww * p);
            grown.emplace_back(std::move(pos), ww * (1.0 - p));
          }
        }
        outs = std::move(grown);
      }
      for (auto& [pos, ww] : outs) next[std::move(pos)] += ww;
    }
    dist = std::move(next);
  }
  return dist;
}

inline double enumerate_exact(const ModelParams& params, const JointQuery& query,
                              bool guarded = true) {
  params.validate();
  query.validate();
  const int n_bulk = query.indices.back();
  if (params.t > 5 || n_bulk > 4)
    throw TooLarge("enumerate_exact: limited to t <= 5, N <= 4");
  ParticleSystem s = guarded ? init_periodic_guarded(params.d, n_bulk, params.t)
                             : init_periodic(params.d, n_bulk);
  const auto dist = enumerate_dist(s.positions, params.t, params.p);
  const bool geq = query.convention == EventConvention::GEQ_event;
  double acc = 0.0;
  for (const auto& [cfg, w] : dist) {
    bool ok = true;
    for (std::size_t k = 0; k < query.indices.size() && ok; ++k) {
      const long long x = cfg[s.slot(query.indices[k])];
      ok = geq ? (x >= query.thresholds[k]) : (x <= query.thresholds[k]);
    }
    if (ok) acc += w;
  }
  return acc;
}

// fraction of samples satisfying the query, with binomial standard error
inline std::pair<double, double> empirical_joint_cdf(
    const std::vector<std::vector<long long>>& samples, const JointQuery& query) {
  query.validate();
  if (samples.size() < 2)
    throw ValidationError("empirical_joint_cdf: need at least 2 samples");
  const bool geq = query.convention == EventConvention::GEQ_event;
  long long hits = 0;
  for (const auto& rec : samples) {
    if (rec.size() != query.thresholds.size())
      throw ValidationError("empirical_joint_cdf: sample arity mismatch");
    bool ok = true;
    for (std::size_t k = 0; k < rec.size() && ok; ++k)
      ok = geq ? (rec[k] >= query.thresholds[k]) : (rec[k] <= query.thresholds[k]);
    if (ok) ++hits;
  }
  const double n = double(samples.size());
  const double phat = double(hits) / n;
  return {phat, std::sqrt(phat * (1.0 - phat) / n)};
}

struct HeightProfile {
  long long anchor = 0;  // N_t; h(0) = 2 N_t
  long long x_lo = 0;
  std::vector<long long> heights;  // h(x_lo) ... h(x_hi)

  long long h(long long x) const { return heights.at(std::size_t(x - x_lo)); }
};

// Interface heights from occupations: slope -1 across occupied [x,x+1], +1
// across empty, anchored at h(0) = 2 N_t. Sites left of the leftmost known
// particle are not covered (the infinite system has particles there).
inline HeightProfile height_function(const ParticleSystem& s, long long n_t,
                                     long long x_lo, long long x_hi) {
  if (x_lo > x_hi) throw ValidationError("height_function: empty window");
  if (!s.positions.empty() && x_lo < s.positions.back())
    throw WindowUncovered("height_function: window extends left of known occupations");
  auto occupied = [&](long long x) {
    return std::binary_search(s.positions.rbegin(), s.positions.rend(), x);
  };
  auto slope = [&](long long x) { return occupied(x) ? -1LL : +1LL; };  // over [x,x+1]
  HeightProfile hp;
  hp.anchor = n_t;
  hp.x_lo = x_lo;
  hp.heights.resize(std::size_t(x_hi - x_lo + 1));
  // integrate slopes away from the anchor at 0
  long long h0 = 2 * n_t;
  if (x_lo >= 0) {
    long long h = h0;
    for (long long x = 0; x < x_lo; ++x) h += slope(x);
    for (long long x = x_lo; x <= x_hi; ++x) {
      hp.heights[std::size_t(x - x_lo)] = h;
      h += slope(x);
    }
  } else {
    long long h = h0;
    for (long long x = -1; x >= x_lo; --x) h -= slope(x);
    for (long long x = x_lo; x <= x_hi; ++x) {
      hp.heights[std::size_t(x - x_lo)] = h;
      h += slope(x);
    }
  }
  return hp;
}

// Empirical jump rate of a bulk particle over the trailing `window` steps.
// An x(t)/t estimator carries the O(t^{-1/3}) Tracy-Widom fluctuation mean as
// bias; the trailing rate only carries its derivative, O(t^{-2/3}), which is
// below Monte Carlo resolution at the scales used here. The observed particle
// is the leftmost of the left-filled system, so N must exceed the reach of the
// right-edge rarefaction fan (label ~ J'(1/d) t / d) for a bulk measurement.
inline double average_speed_estimate(const ModelParams& params, int n,
                                     int n_samples, std::uint64_t seed,
                                     int window = 16, int threads = 1) {
  params.validate();
  if (n < 1 || n_samples < 1) throw ValidationError("average_speed_estimate: bad N or sample count");
  window = int(std::min<long long>(window, params.t));
  if (window < 1) throw ValidationError("average_speed_estimate: t too small");
  std::vector<long long> jumps(n_samples, 0);
  auto run_range = [&](int lo, int hi) {
    for (int sidx = lo; sidx < hi; ++sidx) {
      ParticleSystem s = init_periodic(params.d, n);
      num::SeededRng rng(seed, std::uint64_t(sidx) + 1);
      for (long long k = 0; k < params.t - window; ++k) step(s, params.p, rng);
      const long long before = s.positions[std::size_t(n - 1)];
      for (int k = 0; k < window; ++k) step(s, params.p, rng);
      jumps[sidx] = s.positions[std::size_t(n - 1)] - before;
    }
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    run_range(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_samples + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const int lo = w * chunk, hi = std::min(n_samples, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  long long total = 0;
  for (long long j : jumps) total += j;
  return double(total) / (double(window) * double(n_samples));
}

}  // namespace tasep::sim
