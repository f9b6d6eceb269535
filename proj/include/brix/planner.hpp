#pragma once

// Unified query front door: picks the cheapest executable strategy and
// runs it, timing strategy execution only (index loading happens before).

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "brix/core.hpp"
#include "brix/index.hpp"
#include "brix/scan.hpp"

namespace brix::plan {

struct ByRow {
  std::uint64_t row_number = 0;  // >= 1
};

struct ByKey {
  std::uint32_t column = 0;
  NormalizedKey key;
};

enum class Override : std::uint8_t { auto_pick, line_scan, field_scan, chunked_scan, index };

struct Query {
  std::variant<ByRow, ByKey> target;
  Override strategy = Override::auto_pick;
};

struct StrategyUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Preloaded index handles. Loading (and its validation cost) is the
// caller's business so query timings exclude it.
struct IndexSet {
  std::optional<index::IndexHandle> row_index;
  std::vector<index::IndexHandle> key_indexes;

  const index::IndexHandle* find_key_index(std::uint32_t column, KeyKind kind) const;
};

// Deterministic choice: an override is honored or StrategyUnavailable is
// thrown; auto picks a matching valid index, else field_scan (by_key) or
// a positional walk reported as field_scan (by_row).
scan::Strategy plan(const Query& query, const IndexSet& indexes);

struct QueryResult {
  std::vector<scan::MatchResult> matches;  // ordered by row number
  scan::Strategy strategy = scan::Strategy::field_scan;
  double elapsed_s = 0.0;
  std::uint64_t bytes_scanned = 0;
};

struct ExecuteOptions {
  std::size_t chunk_rows = 65536;
  unsigned threads = 0;  // chunked_scan workers; 0 = auto
};

// Runs the planned strategy. by_key via line_scan searches the normalized
// key text and keeps exact-field matches only, so every executable
// strategy returns the same match set. field_scan runs without early exit
// for the same reason.
QueryResult execute(const Query& query, const DatasetDescriptor& dataset,
                    const IndexSet& indexes, ExecuteOptions options = {});

}  // namespace brix::plan
