#pragma once

#include <cmath>
#include <cstdint>

namespace smoothprob {

// Counter-style splitmix64 stream.  A stream is fully determined by
// (seed, stream_id), so parallel batches can each own one and results never
// depend on scheduling.  State advances by the 64-bit golden ratio; the
// output function is the usual splitmix64 finalizer.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : state_(mix(seed ^ mix(stream_id + 0x9E3779B97F4A7C15ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform on (0, 1]; never 0, so logarithms are safe.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Exp(1) by inversion.
  double next_exponential() { return -std::log(next_unit()); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace smoothprob
