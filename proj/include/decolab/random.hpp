#pragma once

#include <cstdint>
#include <utility>

namespace decolab {

/// Counter-based generator: the n-th draw of stream `seed` is a pure
/// function of (seed, n), so sample partitions can be evaluated in any
/// order or on any worker and recombined bit-exactly.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t start = 0)
      : seed_(seed), counter_(start) {}

  static std::uint64_t hash(std::uint64_t seed, std::uint64_t counter);

  std::uint64_t next_u64() { return hash(seed_, counter_++); }
  /// Uniform on the open interval (0, 1).
  double next_uniform();
  /// Two independent standard normals (Box-Muller).
  std::pair<double, double> next_normal_pair();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace decolab
