#pragma once

#include <cstdint>
#include <string_view>

namespace pardg {

// SplitMix64 finalizer (Steele/Lea/Vigna). Pure integer arithmetic, so the
// stream is identical on every platform.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a over the purpose tag.
inline constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based deterministic generator keyed by (seed, purpose tag, stream).
///
/// Output i of a stream is mix64(key + i) with
///   key = mix64(mix64(seed ^ mix64(fnv1a(tag))) + stream).
/// The exact construction is documented in the README; every randomized
/// operation in the library derives its draws from this generator.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view tag, std::uint64_t stream = 0)
      : key_(mix64(mix64(seed ^ mix64(fnv1a(tag))) + stream)) {}

  std::uint64_t next_u64() { return mix64(key_ + counter_++); }

  /// Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1].
  double next_double_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  bool next_bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pardg
