#pragma once

// Byte-scan kernels behind the hot loops: newline framing, delimiter
// splitting and ASCII lowering. Scalar reference implementations live in
// kernels::scalar and are the oracle; the top-level entry points dispatch
// to an AVX2/NEON variant picked once at startup from CPU capabilities.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace brix::kernels {

namespace scalar {

// Index of the first occurrence of `needle`, or `n` when absent.
std::size_t find_byte(const void* data, std::size_t n, std::uint8_t needle);

std::size_t count_byte(const void* data, std::size_t n, std::uint8_t needle);

// Lowercases 'A'..'Z' only; other bytes copied through. src and dst may alias.
void ascii_lower(const void* src, void* dst, std::size_t n);

}  // namespace scalar

std::size_t find_byte(const void* data, std::size_t n, std::uint8_t needle);
std::size_t count_byte(const void* data, std::size_t n, std::uint8_t needle);
void ascii_lower(const void* src, void* dst, std::size_t n);

// Name of the active backend: "avx2", "neon" or "scalar".
std::string_view backend();

inline std::size_t find_byte(std::string_view s, char needle) {
  return find_byte(s.data(), s.size(), static_cast<std::uint8_t>(needle));
}

inline std::size_t count_byte(std::string_view s, char needle) {
  return count_byte(s.data(), s.size(), static_cast<std::uint8_t>(needle));
}

}  // namespace brix::kernels
