#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace suffbench {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// First 8 bytes of SHA-256 as a big-endian integer. Used to seed
/// deterministic pseudo-random streams from content.
std::uint64_t sha256_u64(std::string_view data);

/// SplitMix64 step; the mock backend's deterministic stream.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_double(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

}  // namespace suffbench
