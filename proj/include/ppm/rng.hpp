#pragma once

#include <cstdint>
#include <random>

namespace ppm {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser; a bijective mix of a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream for (master seed, counter, lane).
///
/// Trial t of a run always draws from stream(seed, t, 0) no matter which
/// worker executes it, so results do not depend on scheduling. Lane 0 is
/// reserved for the valuation profile; mechanisms that randomise (artificial
/// quantiles for dummy items) use lane 1, which keeps profiles common across
/// mechanisms compared on the same seed.
inline Rng stream(std::uint64_t master_seed, std::uint64_t counter, std::uint64_t lane = 0)
{
  return Rng(mix64(mix64(master_seed) ^ mix64(counter + 0x632BE59BD9B4E019ULL * (lane + 1))));
}

}  // namespace ppm
