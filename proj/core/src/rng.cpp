#include "poolnet/rng.hpp"

#include <cmath>
#include <numbers>

#include "poolnet/errors.hpp"

namespace poolnet {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0x632BE59BD9B4E019ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), key_(mix64(mix64(seed + kGolden) ^ mix64(stream + kStreamSalt))) {}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw ParameterError("uniform_index: empty range");
  // Rejection keeps the result exactly uniform.
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

int RngStream::sign() { return (next_u64() >> 63) ? 1 : -1; }

RngStream RngStream::split(std::uint64_t stream_id) const {
  return RngStream(seed_, mix64(key_ ^ mix64(stream_id + kStreamSalt)), 0);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(base + kGolden);
  for (std::uint64_t t : tags) h = mix64(h ^ mix64(t + kStreamSalt));
  return h;
}

}  // namespace poolnet
