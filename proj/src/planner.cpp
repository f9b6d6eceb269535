#include "brix/planner.hpp"

#include <chrono>

#include "brix/csv.hpp"

namespace brix::plan {

namespace {

using SteadyClock = std::chrono::steady_clock;

double seconds_since(SteadyClock::time_point t0) {
  return std::chrono::duration<double>(SteadyClock::now() - t0).count();
}

// Bytes of the records handed back, the honest read volume of an index
// lookup (index-entry reads are accounted separately by the counters).
std::uint64_t record_bytes(const std::vector<scan::MatchResult>& matches,
                           const CsvDialect& dialect) {
  std::uint64_t total = 0;
  for (const auto& m : matches) {
    total += csv::write_row(m.record.fields, dialect).size() + 1;
  }
  return total;
}

// Resolves a record offset back to its data-row ordinal via the
// row-offset index (offsets are strictly increasing). 0 when absent.
std::uint64_t row_for_offset(const index::IndexHandle& rows, std::uint64_t offset) {
  std::uint64_t lo = 0;
  std::uint64_t hi = rows.header().entry_count;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (rows.lookup_row(mid + 1) < offset) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < rows.header().entry_count && rows.lookup_row(lo + 1) == offset) {
    return lo + 1;
  }
  return 0;
}

}  // namespace

const index::IndexHandle* IndexSet::find_key_index(std::uint32_t column,
                                                   KeyKind kind) const {
  for (const auto& handle : key_indexes) {
    const auto& h = handle.header();
    if (h.kind == index::IndexKind::key && h.column == column &&
        h.key_kind == static_cast<std::uint8_t>(kind)) {
      return &handle;
    }
  }
  return nullptr;
}

scan::Strategy plan(const Query& query, const IndexSet& indexes) {
  const bool by_row = std::holds_alternative<ByRow>(query.target);
  switch (query.strategy) {
    case Override::index:
      if (by_row) {
        if (!indexes.row_index) {
          throw StrategyUnavailable("row-offset index not loaded");
        }
      } else {
        const auto& k = std::get<ByKey>(query.target);
        if (!indexes.find_key_index(k.column, k.key.kind)) {
          throw StrategyUnavailable(
              std::string("no valid ") + key_kind_name(k.key.kind) +
              " index for column " + std::to_string(k.column));
        }
      }
      return scan::Strategy::index_lookup;
    case Override::field_scan:
      return scan::Strategy::field_scan;
    case Override::chunked_scan:
      if (by_row) throw StrategyUnavailable("chunked_scan serves key queries only");
      return scan::Strategy::chunked_scan;
    case Override::line_scan:
      if (by_row) throw StrategyUnavailable("line_scan serves key queries only");
      return scan::Strategy::line_scan_all;
    case Override::auto_pick:
      break;
  }
  if (by_row) {
    return indexes.row_index ? scan::Strategy::index_lookup
                             : scan::Strategy::field_scan;
  }
  const auto& k = std::get<ByKey>(query.target);
  return indexes.find_key_index(k.column, k.key.kind)
             ? scan::Strategy::index_lookup
             : scan::Strategy::field_scan;
}

QueryResult execute(const Query& query, const DatasetDescriptor& dataset,
                    const IndexSet& indexes, ExecuteOptions options) {
  QueryResult result;
  result.strategy = plan(query, indexes);
  const auto t0 = SteadyClock::now();

  if (const auto* by_row = std::get_if<ByRow>(&query.target)) {
    if (by_row->row_number < 1) {
      throw std::invalid_argument("by_row requires row_number >= 1");
    }
    if (result.strategy == scan::Strategy::index_lookup) {
      try {
        const std::uint64_t offset = indexes.row_index->lookup_row(by_row->row_number);
        File file(dataset.path);
        scan::MatchResult m;
        m.record = csv::row_at_offset(file, offset, dataset.dialect, by_row->row_number);
        m.strategy = scan::Strategy::index_lookup;
        result.matches.push_back(std::move(m));
        result.bytes_scanned = record_bytes(result.matches, dataset.dialect);
      } catch (const index::IndexError& e) {
        if (e.code != index::IndexErrorCode::out_of_range) throw;
        // absent row: empty result, no error
      }
    } else {
      // Positional walk: count lines to the target row, O(n) in position.
      csv::LineScanner scanner(dataset.path);
      bool skip_header = dataset.has_header;
      std::uint64_t data_row = 0;
      while (auto line = scanner.next()) {
        if (skip_header) {
          skip_header = false;
          continue;
        }
        ++data_row;
        if (data_row != by_row->row_number) continue;
        scan::MatchResult m;
        m.record.row_number = data_row;
        m.record.byte_offset = line->byte_offset;
        m.record.fields = csv::parse_row(line->bytes, dataset.dialect);
        m.strategy = scan::Strategy::field_scan;
        result.matches.push_back(std::move(m));
        break;
      }
      result.bytes_scanned = scanner.bytes_consumed();
    }
  } else {
    const auto& by_key = std::get<ByKey>(query.target);
    switch (result.strategy) {
      case scan::Strategy::index_lookup: {
        const auto* kidx = indexes.find_key_index(by_key.column, by_key.key.kind);
        File file(dataset.path);
        const auto offsets = kidx->lookup_key(by_key.key, file, dataset.dialect);
        for (std::uint64_t offset : offsets) {
          scan::MatchResult m;
          m.record = csv::row_at_offset(file, offset, dataset.dialect);
          if (indexes.row_index) {
            m.record.row_number = row_for_offset(*indexes.row_index, offset);
          }
          m.matched_column = by_key.column;
          m.strategy = scan::Strategy::index_lookup;
          result.matches.push_back(std::move(m));
        }
        result.bytes_scanned = record_bytes(result.matches, dataset.dialect);
        break;
      }
      case scan::Strategy::field_scan: {
        scan::ScanStats stats;
        result.matches = scan::field_scan(dataset, by_key.column, by_key.key,
                                          /*early_exit=*/false, &stats);
        result.bytes_scanned = stats.bytes_scanned;
        break;
      }
      case scan::Strategy::chunked_scan: {
        scan::ScanStats stats;
        result.matches =
            scan::chunked_scan(dataset, by_key.column, by_key.key,
                               {options.chunk_rows, options.threads}, &stats);
        result.bytes_scanned = stats.bytes_scanned;
        break;
      }
      case scan::Strategy::line_scan_all: {
        if (by_key.key.value.empty()) break;  // empty keys match nothing
        scan::Matcher matcher(by_key.key.value);
        scan::ScanStats stats;
        auto raw = scan::line_scan(dataset, matcher, scan::ScanMode::all, &stats);
        // Substring hits are grep semantics; a key query keeps exact-field
        // matches only, so every strategy agrees on the match set.
        for (auto& m : raw) {
          if (m.record.fields.size() <= by_key.column) continue;
          auto candidate =
              make_key(by_key.key.kind, m.record.fields[by_key.column]);
          if (!candidate || candidate->value != by_key.key.value) continue;
          m.matched_column = by_key.column;
          result.matches.push_back(std::move(m));
        }
        result.bytes_scanned = stats.bytes_scanned;
        break;
      }
      case scan::Strategy::line_scan_first:
        throw StrategyUnavailable("line_scan_first is not a planner strategy");
    }
  }

  result.elapsed_s = seconds_since(t0);
  for (auto& m : result.matches) {
    m.elapsed_s = result.elapsed_s;
    m.bytes_scanned = result.bytes_scanned;
  }
  return result;
}

}  // namespace brix::plan
