#include <cstring>

#include "brix/kernels.hpp"

namespace brix::kernels::scalar {

std::size_t find_byte(const void* data, std::size_t n, std::uint8_t needle) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] == needle) return i;
  }
  return n;
}

std::size_t count_byte(const void* data, std::size_t n, std::uint8_t needle) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    count += (p[i] == needle) ? 1 : 0;
  }
  return count;
}

void ascii_lower(const void* src, void* dst, std::size_t n) {
  const auto* s = static_cast<const unsigned char*>(src);
  auto* d = static_cast<unsigned char*>(dst);
  for (std::size_t i = 0; i < n; ++i) {
    unsigned char c = s[i];
    d[i] = (c >= 'A' && c <= 'Z') ? static_cast<unsigned char>(c + 0x20) : c;
  }
}

}  // namespace brix::kernels::scalar
