#pragma once

#include <cstdint>

namespace carnot {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stateless generator keyed by (seed, index, stream): any partition of the
/// index range across workers sees exactly the same numbers.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : key_(splitmix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  constexpr std::uint64_t bits(std::uint64_t index, std::uint64_t stream = 0) const {
    return splitmix64(key_ ^ splitmix64(index * 0x2545f4914f6cdd1dULL + splitmix64(stream + 0x3c6ef372fe94f82bULL)));
  }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t index, std::uint64_t stream = 0) const {
    return static_cast<double>(bits(index, stream) >> 11) * 0x1.0p-53;
  }

  constexpr double uniform(std::uint64_t index, std::uint64_t stream, double lo, double hi) const {
    return lo + (hi - lo) * uniform(index, stream);
  }

 private:
  std::uint64_t key_;
};

}  // namespace carnot
