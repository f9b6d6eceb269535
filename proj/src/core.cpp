#include "brix/core.hpp"

#include <openssl/evp.h>
#include <sys/stat.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <limits>

#include "brix/kernels.hpp"

namespace brix {

namespace {

constexpr std::string_view kAsciiWhitespace = " \t\r\n\v\f";

}  // namespace

std::string_view trim_ascii(std::string_view s) {
  const auto first = s.find_first_not_of(kAsciiWhitespace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kAsciiWhitespace);
  return s.substr(first, last - first + 1);
}

NormalizedKey normalize_email(std::string_view raw) {
  std::string_view trimmed = trim_ascii(raw);
  std::string value(trimmed.size(), '\0');
  kernels::ascii_lower(trimmed.data(), value.data(), trimmed.size());
  return {KeyKind::email, std::move(value)};
}

NormalizedKey normalize_phone(std::string_view raw) {
  std::string value;
  value.reserve(raw.size());
  for (char c : raw) {
    if (c >= '0' && c <= '9') value.push_back(c);
  }
  return {KeyKind::phone, std::move(value)};
}

std::optional<std::uint64_t> parse_u64_field(std::string_view field) {
  std::string_view s = trim_ascii(field);
  if (s.empty()) return std::nullopt;
  std::uint64_t value = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
    if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) {
      return std::nullopt;  // overflow
    }
    value = value * 10 + digit;
  }
  return value;
}

std::optional<NormalizedKey> normalize_integer(std::string_view raw) {
  auto value = parse_u64_field(raw);
  if (!value) return std::nullopt;
  return NormalizedKey{KeyKind::integer, std::to_string(*value)};
}

NormalizedKey verbatim_key(std::string_view raw) {
  return {KeyKind::verbatim, std::string(raw)};
}

std::optional<NormalizedKey> make_key(KeyKind kind, std::string_view raw) {
  switch (kind) {
    case KeyKind::email:
      return normalize_email(raw);
    case KeyKind::phone:
      return normalize_phone(raw);
    case KeyKind::integer:
      return normalize_integer(raw);
    case KeyKind::verbatim:
      return verbatim_key(raw);
  }
  return std::nullopt;
}

const char* key_kind_name(KeyKind kind) {
  switch (kind) {
    case KeyKind::email:
      return "email";
    case KeyKind::phone:
      return "phone";
    case KeyKind::integer:
      return "integer";
    case KeyKind::verbatim:
      return "verbatim";
  }
  return "unknown";
}

std::optional<KeyKind> key_kind_from_name(std::string_view name) {
  if (name == "email") return KeyKind::email;
  if (name == "phone") return KeyKind::phone;
  if (name == "integer" || name == "int") return KeyKind::integer;
  if (name == "verbatim") return KeyKind::verbatim;
  return std::nullopt;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

Fingerprint fingerprint_dataset(const std::filesystem::path& path) {
  struct ::stat st{};
  if (::stat(path.c_str(), &st) != 0) {
    throw IoError("cannot stat " + path.string() + ": " + std::strerror(errno));
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::string head(kFingerprintHeadBytes, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  if (in.bad()) {
    throw IoError("read failed on " + path.string());
  }
  head.resize(static_cast<std::size_t>(in.gcount()));

  Fingerprint fp;
  fp.size_bytes = static_cast<std::uint64_t>(st.st_size);
  fp.modified_time = static_cast<std::uint64_t>(st.st_mtime);
  unsigned int digest_len = 0;
  if (EVP_Digest(head.data(), head.size(), fp.head_digest.data(), &digest_len,
                 EVP_sha256(), nullptr) != 1 ||
      digest_len != fp.head_digest.size()) {
    throw IoError("digest failed on " + path.string());
  }
  return fp;
}

}  // namespace brix
