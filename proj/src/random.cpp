#include "decolab/random.hpp"

#include <cmath>
#include <numbers>

namespace decolab {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::hash(std::uint64_t seed, std::uint64_t counter) {
  // splitmix64 over a Weyl sequence whose offset is itself a hash of the seed
  const std::uint64_t key = mix64(seed + 0xD1B54A32D192ED03ull);
  return mix64(key + (counter + 1) * 0x9E3779B97F4A7C15ull);
}

double CounterRng::next_uniform() {
  // 53 random bits, shifted off zero
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::pair<double, double> CounterRng::next_normal_pair() {
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace decolab
