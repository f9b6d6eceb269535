#pragma once

// Shared domain types: CSV dialect, dataset descriptor and fingerprint,
// parsed records, normalized lookup keys and the key hash.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace brix {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EscapeMode : std::uint8_t { doubled_quote };
enum class Encoding : std::uint8_t { utf8_lossy };

struct CsvDialect {
  char delimiter = ',';
  char quote = '"';
  EscapeMode escape_mode = EscapeMode::doubled_quote;
  Encoding encoding = Encoding::utf8_lossy;
};

// Compact identity of a source file; equality gates index reuse.
struct Fingerprint {
  std::uint64_t size_bytes = 0;
  std::uint64_t modified_time = 0;  // seconds since epoch
  std::array<std::uint8_t, 32> head_digest{};  // SHA-256 of the first 64 KiB

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

struct DatasetDescriptor {
  std::filesystem::path path;
  std::uint64_t size_bytes = 0;
  std::uint64_t row_count = 0;  // data rows; excludes the header when has_header
  std::uint32_t column_count = 1;
  bool has_header = false;
  CsvDialect dialect;
  Fingerprint fingerprint;
};

struct RawRecord {
  std::uint64_t row_number = 0;  // 1-based data-row ordinal; 0 when unknown
  std::uint64_t byte_offset = 0;
  std::vector<std::string> fields;
};

enum class KeyKind : std::uint8_t { email = 1, phone = 2, integer = 3, verbatim = 4 };

// A lookup key in canonical form. email: trimmed + ASCII-lowercased.
// phone: ASCII digits only. integer: base-10 u64 without leading zeros.
// verbatim: raw bytes. An empty value matches no rows by contract.
struct NormalizedKey {
  KeyKind kind = KeyKind::verbatim;
  std::string value;

  friend bool operator==(const NormalizedKey&, const NormalizedKey&) = default;
};

NormalizedKey normalize_email(std::string_view raw);
NormalizedKey normalize_phone(std::string_view raw);

// nullopt when raw does not trim to a base-10 unsigned integer that fits u64.
std::optional<NormalizedKey> normalize_integer(std::string_view raw);

NormalizedKey verbatim_key(std::string_view raw);

// Normalizes raw under the given kind; nullopt only for kind=integer.
std::optional<NormalizedKey> make_key(KeyKind kind, std::string_view raw);

const char* key_kind_name(KeyKind kind);
std::optional<KeyKind> key_kind_from_name(std::string_view name);

std::string_view trim_ascii(std::string_view s);

// Tolerant field-side integer parse: trims, accepts leading zeros,
// rejects anything else or values beyond u64.
std::optional<std::uint64_t> parse_u64_field(std::string_view field);

// FNV-1a, 64-bit. The key-index hash; trivial to reimplement bit-for-bit.
std::uint64_t fnv1a64(std::string_view bytes);

constexpr std::size_t kFingerprintHeadBytes = 64 * 1024;

Fingerprint fingerprint_dataset(const std::filesystem::path& path);

}  // namespace brix
