#pragma once

// Unindexed retrieval strategies: Boyer-Moore substring matching over raw
// lines, early-exit field-equality scan, and a chunked column scan that
// leans on the SIMD kernels and optional worker threads.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brix/core.hpp"

namespace brix::scan {

enum class Strategy : std::uint8_t {
  line_scan_all,
  line_scan_first,
  field_scan,
  chunked_scan,
  index_lookup,
};

const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(std::string_view name);

// Boyer-Moore matcher with both the bad-character and good-suffix
// heuristics; tables derive solely from the pattern.
class Matcher {
 public:
  explicit Matcher(std::string pattern);  // throws std::invalid_argument if empty

  const std::string& pattern() const { return pattern_; }

  // Smallest offset where the pattern occurs, or nullopt.
  std::optional<std::size_t> find(std::string_view haystack) const;

  const std::array<std::size_t, 256>& bad_char_table() const { return bad_char_; }
  const std::vector<std::size_t>& good_suffix_table() const { return good_suffix_; }

 private:
  std::string pattern_;
  std::array<std::size_t, 256> bad_char_{};
  std::vector<std::size_t> good_suffix_;
};

inline std::optional<std::size_t> bm_find(const Matcher& matcher,
                                          std::string_view haystack) {
  return matcher.find(haystack);
}

struct MatchResult {
  RawRecord record;
  std::optional<std::uint32_t> matched_column;
  Strategy strategy = Strategy::line_scan_all;
  double elapsed_s = 0.0;       // wall time of the whole call
  std::uint64_t bytes_scanned = 0;
};

struct ScanStats {
  std::uint64_t rows_scanned = 0;
  std::uint64_t malformed_skipped = 0;
  std::uint64_t non_integer_fields = 0;  // integer-kind scans only
  std::uint64_t bytes_scanned = 0;
  double elapsed_s = 0.0;
};

enum class ScanMode : std::uint8_t { first, all };

// Zero-allocation comparer: does a raw field match the key under its
// kind's normalization? Semantics are identical to normalizing the field
// and comparing values.
class KeyProbe {
 public:
  explicit KeyProbe(const NormalizedKey& key);

  bool matches(std::string_view raw_field) const;
  const NormalizedKey& key() const { return key_; }
  // Empty keys match no rows by contract.
  bool never_matches() const { return key_.value.empty(); }

 private:
  NormalizedKey key_;
  std::uint64_t integer_value_ = 0;
};

// grep analogue: raw-line substring search, byte-exact. mode=all scans the
// whole file (bytes_scanned = file size); mode=first stops at the first
// matching line. The header line is not searched.
std::vector<MatchResult> line_scan(const DatasetDescriptor& dataset,
                                   const Matcher& matcher, ScanMode mode,
                                   ScanStats* stats = nullptr);

// Unindexed engine analogue: parses every row into owned fields,
// normalizes the target column under the key's kind and compares.
// early_exit stops after the first matching row. Rows failing an integer
// parse under kind=integer are non-matches; malformed rows are skipped
// and counted.
std::vector<MatchResult> field_scan(const DatasetDescriptor& dataset,
                                    std::uint32_t column, const NormalizedKey& key,
                                    bool early_exit, ScanStats* stats = nullptr);

struct ChunkedScanOptions {
  std::size_t chunk_rows = 65536;
  unsigned threads = 0;  // 0 = hardware concurrency (capped)
};

// Dataframe analogue: chunked columnar scan. Extracts only the target
// column per row, compares without allocating, and returns the same
// result set as field_scan(early_exit=false). Peak buffered records stay
// <= chunk_rows across all workers.
std::vector<MatchResult> chunked_scan(const DatasetDescriptor& dataset,
                                      std::uint32_t column, const NormalizedKey& key,
                                      ChunkedScanOptions options = {},
                                      ScanStats* stats = nullptr);

}  // namespace brix::scan
