// Deterministic seed derivation and sampling helpers.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "resil/types.hpp"

namespace resil {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Case seed: pure function of (plan seed, ordinal).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t ordinal) {
  return splitmix64(seed ^ splitmix64(ordinal + 1));
}

// Named sub-stream so independent consumers of one seed never share state.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ h);
}

inline double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// One-way link latency sample: uniform in base*(1 +/- jitter_fraction).
inline double sample_link_latency(const LinkProfile& link, std::mt19937_64& rng) {
  if (link.jitter_fraction <= 0.0) return link.base_latency_ms;
  std::uniform_real_distribution<double> d(
      link.base_latency_ms * (1.0 - link.jitter_fraction),
      link.base_latency_ms * (1.0 + link.jitter_fraction));
  return d(rng);
}

// Bernoulli drop sample against the link's loss probability.
inline bool sample_link_drop(const LinkProfile& link, std::mt19937_64& rng) {
  if (link.drop_prob <= 0.0) return false;
  if (link.drop_prob >= 1.0) return true;
  return uniform01(rng) < link.drop_prob;
}

}  // namespace resil
