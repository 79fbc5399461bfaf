#pragma once

#include <cstdint>

#include "polylab/lattice.hpp"

// Counter-based randomness. Every random quantity in the library is a pure
// function of a 64-bit key and a counter, so any site or any sample can be
// regenerated in O(1) without replaying a stream.

namespace polylab {

/// SplitMix64 finalizer (no state increment).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t zigzag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

namespace keys {
inline constexpr std::uint64_t kTime = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kCoord[kMaxDim] = {
    0xD6E8FEB86659FD93ULL, 0xA0761D6478BD642FULL, 0xE7037ED1A0B428DBULL, 0x8EBC6AF09C88C6E3ULL};
inline constexpr std::uint64_t kReplica = 0xC2B2AE3D27D4EB4FULL;
inline constexpr std::uint64_t kCounter = 0x165667B19E3779F9ULL;
inline constexpr std::uint64_t kIndex = 0x27D4EB2F165667C5ULL;

// Stream tags: distinct uses of one seed never share a key.
inline constexpr std::uint64_t kSamplerTag = 0x73616D706C657221ULL;
inline constexpr std::uint64_t kJitterTag = 0x6A69747465722121ULL;
inline constexpr std::uint64_t kCalibrationTag = 0x63616C6962726174ULL;
inline constexpr std::uint64_t kFamilyTag = 0x66616D696C792121ULL;
inline constexpr std::uint64_t kBrownianTag = 0x62726F776E69616EULL;
inline constexpr std::uint64_t kDecompositionTag = 0x6465636F6D706F73ULL;
}  // namespace keys

/// Zigzag-encoded coordinates combined with distinct odd multipliers.
constexpr std::uint64_t pack_site(const Site& x) {
  std::uint64_t h = 0;
  for (int i = 0; i < kMaxDim; ++i) h += zigzag(x[i]) * keys::kCoord[i];
  return h;
}

/// Hash of an environment site: mix64(seed ^ mix64(k * P1) ^ mix64(packed x)).
constexpr std::uint64_t site_hash(std::uint64_t seed, std::int64_t k, const Site& x) {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(k) * keys::kTime) ^ mix64(pack_site(x)));
}

/// Maps a 64-bit hash to the open interval (0, 1): the top 52 bits plus one
/// half, so every value is exact and the extremes are 2^-53 and 1 - 2^-53.
constexpr double to_open_unit(std::uint64_t h) {
  return (static_cast<double>(h >> 12) + 0.5) * 0x1.0p-52;
}

/// Seed of the environment used by replica r of a run with base seed `seed`.
constexpr std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) {
  return mix64(seed ^ mix64((replica + 1) * keys::kReplica));
}

/// A keyed uniform stream: uniform(c) is a pure function of (key, c).
class KeyedStream {
 public:
  constexpr KeyedStream() = default;
  constexpr explicit KeyedStream(std::uint64_t key) : key_(key) {}

  /// Derives a stream for (seed, tag, a, b), e.g. (seed, sampler, replica, path).
  static constexpr KeyedStream derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t a,
                                      std::uint64_t b) {
    std::uint64_t k = mix64(seed ^ tag);
    k = mix64(k ^ ((a + 1) * keys::kReplica));
    k = mix64(k ^ ((b + 1) * keys::kIndex));
    return KeyedStream(k);
  }

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return mix64(key_ ^ mix64((counter + 1) * keys::kCounter));
  }
  constexpr double uniform(std::uint64_t counter) const { return to_open_unit(bits(counter)); }

 private:
  std::uint64_t key_ = 0;
};

}  // namespace polylab
