#pragma once

#include <cmath>
#include <cstdint>

namespace pdmp {

/// Counter-keyed splittable random stream.
///
/// Each (master_seed, stream_index) pair selects an independent splitmix64
/// sequence by hashing the pair into the initial state. Streams can be
/// created in any order (per Monte Carlo path index, per coupled pair, ...)
/// and always replay the same sequence, so parallel runs are reproducible
/// regardless of scheduling.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
      : master_seed_(master_seed),
        stream_index_(stream_index),
        state_(mix(mix(master_seed + 0x9E3779B97F4A7C15ULL) ^
                   mix(stream_index + 0xBF58476D1CE4E5B9ULL))) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  /// Derive a child stream; children of distinct parents or indices are
  /// statistically independent of each other and of the parent.
  RandomStream substream(std::uint64_t index) const {
    return RandomStream(mix(state_ ^ 0x94D049BB133111EBULL), index);
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0,1); never returns 0 or 1, so logs are
  /// always finite.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::uint64_t state_;
};

}  // namespace pdmp
