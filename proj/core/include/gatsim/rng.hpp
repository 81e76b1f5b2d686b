#pragma once

#include <cstdint>

namespace gatsim {

// Stateless counter-based generator. Every draw is a pure function of
// (seed, stream, counter), so results do not depend on iteration order or on
// how work is split across threads.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t bits(std::uint64_t counter) const;
  // Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const;
  // Standard normal via Box-Muller on uniforms 2*counter and 2*counter+1.
  double normal(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

std::uint64_t mix64(std::uint64_t x);

// Per-trial seed: seed XOR trial index.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) { return seed ^ trial; }

// Named streams so that unrelated quantities never share counters.
namespace stream {
inline constexpr std::uint64_t kLabels = 1;
inline constexpr std::uint64_t kEdges = 2;
inline constexpr std::uint64_t kFeatures = 3;
inline constexpr std::uint64_t kMonteCarlo = 4;
inline constexpr std::uint64_t kAxioms = 5;
}  // namespace stream

}  // namespace gatsim
