#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace selmask {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// 64-bit FNV-1a. `state` allows hashing a stream in pieces.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t state = kFnvOffset) noexcept {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= kFnvPrime;
  }
  return state;
}

/// Lowercase, zero-padded 16 digit hex.
std::string to_hex(std::uint64_t value);

}  // namespace selmask
