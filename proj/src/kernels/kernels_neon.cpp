// NEON variants of the byte kernels; aarch64 only, where NEON is baseline.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstdint>

#include "brix/kernels.hpp"

namespace brix::kernels::neon {

std::size_t find_byte(const void* data, std::size_t n, std::uint8_t needle) {
  const auto* p = static_cast<const unsigned char*>(data);
  const uint8x16_t vneedle = vdupq_n_u8(needle);
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    uint8x16_t eq = vceqq_u8(vld1q_u8(p + i), vneedle);
    // Narrow each 8-bit lane to 4 bits; a set nibble marks a hit.
    uint64_t mask =
        vget_lane_u64(vreinterpret_u64_u8(vshrn_n_u16(vreinterpretq_u16_u8(eq), 4)), 0);
    if (mask != 0) {
      return i + static_cast<std::size_t>(__builtin_ctzll(mask) >> 2);
    }
  }
  for (; i < n; ++i) {
    if (p[i] == needle) return i;
  }
  return n;
}

std::size_t count_byte(const void* data, std::size_t n, std::uint8_t needle) {
  const auto* p = static_cast<const unsigned char*>(data);
  const uint8x16_t vneedle = vdupq_n_u8(needle);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    uint8x16_t eq = vceqq_u8(vld1q_u8(p + i), vneedle);
    count += vaddvq_u8(vshrq_n_u8(eq, 7));
  }
  for (; i < n; ++i) {
    count += (p[i] == needle) ? 1 : 0;
  }
  return count;
}

void ascii_lower(const void* src, void* dst, std::size_t n) {
  const auto* s = static_cast<const unsigned char*>(src);
  auto* d = static_cast<unsigned char*>(dst);
  const uint8x16_t va = vdupq_n_u8('A');
  const uint8x16_t vz = vdupq_n_u8('Z');
  const uint8x16_t case_bit = vdupq_n_u8(0x20);
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    uint8x16_t block = vld1q_u8(s + i);
    uint8x16_t is_upper = vandq_u8(vcgeq_u8(block, va), vcleq_u8(block, vz));
    vst1q_u8(d + i, vaddq_u8(block, vandq_u8(is_upper, case_bit)));
  }
  for (; i < n; ++i) {
    unsigned char c = s[i];
    d[i] = (c >= 'A' && c <= 'Z') ? static_cast<unsigned char>(c + 0x20) : c;
  }
}

}  // namespace brix::kernels::neon

#endif  // aarch64
