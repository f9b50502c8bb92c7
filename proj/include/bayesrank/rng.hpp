#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace bayesrank {

/// xoshiro256** (Blackman & Vigna), seeded through splitmix64.
///
/// Satisfies UniformRandomBitGenerator so it plugs into the <random>
/// distributions. Every chain, replication and generator call owns one of
/// these; nothing is shared between threads.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

 private:
  std::array<std::uint64_t, 4> s_;
};

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a, used to fold string identifiers into seeds.
std::uint64_t fnv1a64(std::string_view text);

/// Stream seed for (master, scenario, replication). Order independent: the
/// same triple always yields the same seed no matter which worker asks.
std::uint64_t stream_seed(std::uint64_t master, std::string_view scenario_id,
                          std::uint64_t rep_index);

// Seed for a named sub-stream (e.g. "design", "sampler") of a parent seed.
std::uint64_t substream_seed(std::uint64_t parent, std::string_view label);

}  // namespace bayesrank
