#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <random>
#include <string>

#include "brix/kernels.hpp"

using namespace brix;

namespace {

std::string random_bytes(std::mt19937_64& rng, std::size_t n, int alphabet) {
  std::uniform_int_distribution<int> dist(0, alphabet - 1);
  std::string s(n, '\0');
  for (auto& c : s) c = static_cast<char>(dist(rng));
  return s;
}

}  // namespace

TEST_CASE("scalar find_byte agrees with memchr") {
  std::mt19937_64 rng(1);
  for (int iter = 0; iter < 2000; ++iter) {
    const std::size_t n = iter % 200;
    // Small alphabet so hits are common.
    std::string buf = random_bytes(rng, n, 7);
    const std::uint8_t needle = static_cast<std::uint8_t>(iter % 7);
    const void* hit = std::memchr(buf.data(), needle, n);
    const std::size_t want =
        hit ? static_cast<std::size_t>(static_cast<const char*>(hit) - buf.data()) : n;
    CHECK(kernels::scalar::find_byte(buf.data(), n, needle) == want);
  }
}

TEST_CASE("dispatched kernels match the scalar reference") {
  std::mt19937_64 rng(2);
  // All small lengths (alignment edges) plus large buffers.
  std::vector<std::size_t> sizes;
  for (std::size_t n = 0; n <= 130; ++n) sizes.push_back(n);
  sizes.insert(sizes.end(), {255, 256, 257, 1023, 4096, 1 << 16, (1 << 20) + 13});

  for (std::size_t n : sizes) {
    std::string buf = random_bytes(rng, n, 5);
    for (int needle : {0, 1, 2, 3, 4, 200}) {
      const auto b = static_cast<std::uint8_t>(needle);
      CHECK(kernels::find_byte(buf.data(), n, b) ==
            kernels::scalar::find_byte(buf.data(), n, b));
      CHECK(kernels::count_byte(buf.data(), n, b) ==
            kernels::scalar::count_byte(buf.data(), n, b));
    }
    std::string lower_a(n, '\0');
    std::string lower_b(n, '\0');
    kernels::ascii_lower(buf.data(), lower_a.data(), n);
    kernels::scalar::ascii_lower(buf.data(), lower_b.data(), n);
    CHECK(lower_a == lower_b);
  }
}

TEST_CASE("count_byte agrees with std::count") {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 500; ++iter) {
    std::string buf = random_bytes(rng, 1 + iter % 3000, 4);
    const std::uint8_t needle = static_cast<std::uint8_t>(iter % 4);
    const auto want = static_cast<std::size_t>(
        std::count(buf.begin(), buf.end(), static_cast<char>(needle)));
    CHECK(kernels::count_byte(buf.data(), buf.size(), needle) == want);
  }
}

TEST_CASE("ascii_lower matches tolower on ASCII and is byte-stable beyond") {
  std::string all(256, '\0');
  for (int i = 0; i < 256; ++i) all[static_cast<std::size_t>(i)] = static_cast<char>(i);
  std::string out(256, '\0');
  kernels::ascii_lower(all.data(), out.data(), all.size());
  for (int i = 0; i < 256; ++i) {
    const auto c = static_cast<unsigned char>(all[static_cast<std::size_t>(i)]);
    const auto got = static_cast<unsigned char>(out[static_cast<std::size_t>(i)]);
    if (c >= 'A' && c <= 'Z') {
      CHECK(got == c + 0x20);
    } else {
      CHECK(got == c);
    }
  }
}

TEST_CASE("ascii_lower works in place") {
  std::string s = "MiXeD 123 \xC3\x84 CASE";
  std::string copy = s;
  kernels::ascii_lower(s.data(), s.data(), s.size());
  kernels::scalar::ascii_lower(copy.data(), copy.data(), copy.size());
  CHECK(s == copy);
  CHECK(s.substr(0, 9) == "mixed 123");
}

TEST_CASE("find_byte returns n when absent") {
  const std::string buf(1000, 'x');
  CHECK(kernels::find_byte(buf.data(), buf.size(), 'y') == buf.size());
  CHECK(kernels::find_byte(buf.data(), 0, 'x') == 0);
}

TEST_CASE("a real backend is selected") {
  const auto name = kernels::backend();
  CHECK((name == "avx2" || name == "neon" || name == "scalar"));
#if defined(__x86_64__)
  if (__builtin_cpu_supports("avx2")) CHECK(name == "avx2");
#endif
}
