// AVX2 variants of the byte kernels. This translation unit is compiled
// with -mavx2 on x86-64; the dispatcher only routes here after a runtime
// CPUID check, so the rest of the binary stays baseline.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstdint>

#include "brix/kernels.hpp"

namespace brix::kernels::avx2 {

std::size_t find_byte(const void* data, std::size_t n, std::uint8_t needle) {
  const auto* p = static_cast<const unsigned char*>(data);
  const __m256i vneedle = _mm256_set1_epi8(static_cast<char>(needle));
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i block =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
    std::uint32_t mask = static_cast<std::uint32_t>(
        _mm256_movemask_epi8(_mm256_cmpeq_epi8(block, vneedle)));
    if (mask != 0) {
      return i + static_cast<std::size_t>(__builtin_ctz(mask));
    }
  }
  for (; i < n; ++i) {
    if (p[i] == needle) return i;
  }
  return n;
}

std::size_t count_byte(const void* data, std::size_t n, std::uint8_t needle) {
  const auto* p = static_cast<const unsigned char*>(data);
  const __m256i vneedle = _mm256_set1_epi8(static_cast<char>(needle));
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i block =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
    std::uint32_t mask = static_cast<std::uint32_t>(
        _mm256_movemask_epi8(_mm256_cmpeq_epi8(block, vneedle)));
    count += static_cast<std::size_t>(__builtin_popcount(mask));
  }
  for (; i < n; ++i) {
    count += (p[i] == needle) ? 1 : 0;
  }
  return count;
}

void ascii_lower(const void* src, void* dst, std::size_t n) {
  const auto* s = static_cast<const unsigned char*>(src);
  auto* d = static_cast<unsigned char*>(dst);
  // c is uppercase iff (c - 'A') unsigned-lt 26; signed trick: shift the
  // range so the comparison works on epi8.
  const __m256i offset = _mm256_set1_epi8(static_cast<char>(0x80));
  const __m256i lo = _mm256_set1_epi8(static_cast<char>('A' - 1 + 0x80u));
  const __m256i hi = _mm256_set1_epi8(static_cast<char>('Z' + 1 + 0x80u));
  const __m256i case_bit = _mm256_set1_epi8(0x20);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i block =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s + i));
    __m256i shifted = _mm256_add_epi8(block, offset);
    __m256i is_upper = _mm256_and_si256(_mm256_cmpgt_epi8(shifted, lo),
                                        _mm256_cmpgt_epi8(hi, shifted));
    __m256i lowered =
        _mm256_add_epi8(block, _mm256_and_si256(is_upper, case_bit));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(d + i), lowered);
  }
  for (; i < n; ++i) {
    unsigned char c = s[i];
    d[i] = (c >= 'A' && c <= 'Z') ? static_cast<unsigned char>(c + 0x20) : c;
  }
}

}  // namespace brix::kernels::avx2

#endif  // x86-64
