// Runtime backend selection. The choice is made once, from CPU
// capabilities (x86-64) or the target architecture (aarch64); every
// variant is equivalence-tested against kernels::scalar.

#include "brix/kernels.hpp"

namespace brix::kernels {

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
std::size_t find_byte(const void* data, std::size_t n, std::uint8_t needle);
std::size_t count_byte(const void* data, std::size_t n, std::uint8_t needle);
void ascii_lower(const void* src, void* dst, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
std::size_t find_byte(const void* data, std::size_t n, std::uint8_t needle);
std::size_t count_byte(const void* data, std::size_t n, std::uint8_t needle);
void ascii_lower(const void* src, void* dst, std::size_t n);
}  // namespace neon
#endif

namespace {

struct Backend {
  std::size_t (*find_byte)(const void*, std::size_t, std::uint8_t);
  std::size_t (*count_byte)(const void*, std::size_t, std::uint8_t);
  void (*ascii_lower)(const void*, void*, std::size_t);
  const char* name;
};

Backend select_backend() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) {
    return {&avx2::find_byte, &avx2::count_byte, &avx2::ascii_lower, "avx2"};
  }
#elif defined(__aarch64__)
  return {&neon::find_byte, &neon::count_byte, &neon::ascii_lower, "neon"};
#endif
  return {&scalar::find_byte, &scalar::count_byte, &scalar::ascii_lower,
          "scalar"};
}

const Backend& backend_instance() {
  static const Backend backend = select_backend();
  return backend;
}

}  // namespace

std::size_t find_byte(const void* data, std::size_t n, std::uint8_t needle) {
  return backend_instance().find_byte(data, n, needle);
}

std::size_t count_byte(const void* data, std::size_t n, std::uint8_t needle) {
  return backend_instance().count_byte(data, n, needle);
}

void ascii_lower(const void* src, void* dst, std::size_t n) {
  backend_instance().ascii_lower(src, dst, n);
}

std::string_view backend() { return backend_instance().name; }

}  // namespace brix::kernels
