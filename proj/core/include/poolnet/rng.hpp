#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace poolnet {

/// Counter-based random stream.
///
/// The output for draw `c` is a fixed 64-bit mixing function of
/// (key, c), where the key is derived from (seed, stream path). Streams are
/// plain values: copying one forks an identical sequence, and `split()`
/// derives an independent child stream without advancing the parent.
///
/// All distributions are implemented here rather than through <random>
/// distribution classes, whose outputs are implementation-defined; identical
/// seeds therefore give identical samples on every conforming platform.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Standard normal (Box-Muller; the second variate is cached).
  double normal();
  /// Uniform integer in [0, n). Requires n > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  /// +1 or -1 with equal probability.
  int sign();

  /// Independent child stream identified by `stream_id`.
  RngStream split(std::uint64_t stream_id) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t key() const { return key_; }
  std::uint64_t draws() const { return counter_; }

 private:
  RngStream(std::uint64_t seed, std::uint64_t key, int) : seed_(seed), key_(key) {}

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic seed derivation from a base seed and a list of tags.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

}  // namespace poolnet
