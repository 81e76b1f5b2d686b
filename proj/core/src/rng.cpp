#include "gatsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace gatsim {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL))) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const { return mix64(key_ ^ mix64(counter)); }

double CounterRng::uniform(std::uint64_t counter) const {
  // 53 random bits, shifted by half an ulp so that 0 is never returned.
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter) const {
  const double u1 = uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace gatsim
