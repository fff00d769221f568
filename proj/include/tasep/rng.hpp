#pragma once

#include <cstdint>

namespace tasep::num {

// Counter-based generator (SplitMix64 core). A stream is fully determined by
// (seed, stream_id), so per-worker streams reproduce identically at any thread
// count. Draw i of a stream depends only on (seed, stream_id, i).
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream_id)
      : state_(mix(mix(seed) ^ mix(stream_id * 0x9E3779B97F4A7C15ull + 0x1D8E4E27C47D124Full))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // uniform in [0,1), 53 random bits
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

 private:
  std::uint64_t state_;
};

}  // namespace tasep::num
