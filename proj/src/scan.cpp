#include "brix/scan.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <thread>

#include "brix/csv.hpp"
#include "brix/file.hpp"
#include "brix/kernels.hpp"

namespace brix::scan {

namespace {

using SteadyClock = std::chrono::steady_clock;

double seconds_since(SteadyClock::time_point t0) {
  return std::chrono::duration<double>(SteadyClock::now() - t0).count();
}

}  // namespace

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::line_scan_all:
      return "line_scan_all";
    case Strategy::line_scan_first:
      return "line_scan_first";
    case Strategy::field_scan:
      return "field_scan";
    case Strategy::chunked_scan:
      return "chunked_scan";
    case Strategy::index_lookup:
      return "index_lookup";
  }
  return "unknown";
}

std::optional<Strategy> strategy_from_name(std::string_view name) {
  std::string canon(name);
  std::replace(canon.begin(), canon.end(), '-', '_');
  if (canon == "line_scan_all" || canon == "line_scan") return Strategy::line_scan_all;
  if (canon == "line_scan_first") return Strategy::line_scan_first;
  if (canon == "field_scan") return Strategy::field_scan;
  if (canon == "chunked_scan") return Strategy::chunked_scan;
  if (canon == "index_lookup" || canon == "index") return Strategy::index_lookup;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Boyer-Moore

namespace {

// suff[i] = length of the longest suffix of the pattern ending at i that
// is also a suffix of the whole pattern.
std::vector<std::ptrdiff_t> suffix_lengths(std::string_view p) {
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(p.size());
  std::vector<std::ptrdiff_t> suff(m);
  suff[m - 1] = m;
  std::ptrdiff_t g = m - 1;
  std::ptrdiff_t f = 0;
  for (std::ptrdiff_t i = m - 2; i >= 0; --i) {
    if (i > g && suff[i + m - 1 - f] < i - g) {
      suff[i] = suff[i + m - 1 - f];
    } else {
      if (i < g) g = i;
      f = i;
      while (g >= 0 && p[g] == p[g + m - 1 - f]) --g;
      suff[i] = f - g;
    }
  }
  return suff;
}

}  // namespace

Matcher::Matcher(std::string pattern) : pattern_(std::move(pattern)) {
  if (pattern_.empty()) {
    throw std::invalid_argument("Matcher requires a non-empty pattern");
  }
  const std::size_t m = pattern_.size();

  bad_char_.fill(m);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    bad_char_[static_cast<unsigned char>(pattern_[i])] = m - 1 - i;
  }

  good_suffix_.assign(m, m);
  const auto suff = suffix_lengths(pattern_);
  std::size_t j = 0;
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(m) - 1; i >= 0; --i) {
    if (suff[i] == i + 1) {
      for (; j < m - 1 - static_cast<std::size_t>(i); ++j) {
        if (good_suffix_[j] == m) good_suffix_[j] = m - 1 - static_cast<std::size_t>(i);
      }
    }
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    good_suffix_[m - 1 - static_cast<std::size_t>(suff[i])] = m - 1 - i;
  }
}

std::optional<std::size_t> Matcher::find(std::string_view haystack) const {
  const std::size_t n = haystack.size();
  const std::size_t m = pattern_.size();
  if (m > n) return std::nullopt;
  const char* h = haystack.data();
  const char* p = pattern_.data();
  std::size_t j = 0;
  while (j <= n - m) {
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(m) - 1;
    while (i >= 0 && p[i] == h[j + i]) --i;
    if (i < 0) return j;
    const auto bc = static_cast<std::ptrdiff_t>(
        bad_char_[static_cast<unsigned char>(h[j + static_cast<std::size_t>(i)])]);
    const auto gs = static_cast<std::ptrdiff_t>(good_suffix_[i]);
    const std::ptrdiff_t bc_shift = bc - static_cast<std::ptrdiff_t>(m) + 1 + i;
    j += static_cast<std::size_t>(std::max(gs, std::max<std::ptrdiff_t>(bc_shift, 1)));
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// KeyProbe

KeyProbe::KeyProbe(const NormalizedKey& key) : key_(key) {
  if (key_.kind == KeyKind::integer && !key_.value.empty()) {
    if (auto v = parse_u64_field(key_.value)) {
      integer_value_ = *v;
    } else {
      key_.value.clear();  // unparseable integer key matches nothing
    }
  }
}

bool KeyProbe::matches(std::string_view raw_field) const {
  if (key_.value.empty()) return false;
  const std::string_view want = key_.value;
  switch (key_.kind) {
    case KeyKind::email: {
      std::string_view f = trim_ascii(raw_field);
      if (f.size() != want.size()) return false;
      for (std::size_t i = 0; i < f.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(f[i]);
        if (c >= 'A' && c <= 'Z') c += 0x20;
        if (static_cast<char>(c) != want[i]) return false;
      }
      return true;
    }
    case KeyKind::phone: {
      std::size_t k = 0;
      for (char c : raw_field) {
        if (c < '0' || c > '9') continue;
        if (k == want.size() || c != want[k]) return false;
        ++k;
      }
      return k == want.size();
    }
    case KeyKind::integer: {
      auto v = parse_u64_field(raw_field);
      return v && *v == integer_value_;
    }
    case KeyKind::verbatim:
      return raw_field == want;
  }
  return false;
}

// ---------------------------------------------------------------------------
// line_scan

std::vector<MatchResult> line_scan(const DatasetDescriptor& dataset,
                                   const Matcher& matcher, ScanMode mode,
                                   ScanStats* stats) {
  const auto t0 = SteadyClock::now();
  const Strategy strategy =
      mode == ScanMode::all ? Strategy::line_scan_all : Strategy::line_scan_first;
  std::vector<MatchResult> results;
  csv::LineScanner scanner(dataset.path);
  bool skip_header = dataset.has_header;
  std::uint64_t data_row = 0;
  std::uint64_t rows_scanned = 0;
  while (auto line = scanner.next()) {
    if (skip_header) {
      skip_header = false;
      continue;
    }
    ++data_row;
    ++rows_scanned;
    if (!matcher.find(line->bytes)) continue;
    MatchResult m;
    m.record.row_number = data_row;
    m.record.byte_offset = line->byte_offset;
    try {
      m.record.fields = csv::parse_row(line->bytes, dataset.dialect);
    } catch (const csv::MalformedRow&) {
      m.record.fields = {std::string(line->bytes)};  // grep keeps the raw line
    }
    m.strategy = strategy;
    results.push_back(std::move(m));
    if (mode == ScanMode::first) break;
  }
  const std::uint64_t bytes = scanner.bytes_consumed();
  const double elapsed = seconds_since(t0);
  for (auto& m : results) {
    m.elapsed_s = elapsed;
    m.bytes_scanned = bytes;
  }
  if (stats) {
    stats->rows_scanned = rows_scanned;
    stats->malformed_skipped = 0;
    stats->bytes_scanned = bytes;
    stats->elapsed_s = elapsed;
  }
  return results;
}

// ---------------------------------------------------------------------------
// field_scan

namespace {

// field_scan is the scalar reference strategy: per-row normalization
// builds an owned canonical value the way the normalize_* operations
// define it, byte by byte. The SIMD comparers live in the chunked lane.
std::string scalar_normalize_email(std::string_view raw) {
  std::string_view t = trim_ascii(raw);
  std::string out;
  out.reserve(t.size());
  for (char c : t) {
    out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c + 0x20) : c);
  }
  return out;
}

std::string scalar_normalize_phone(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    if (c >= '0' && c <= '9') out.push_back(c);
  }
  return out;
}

}  // namespace

std::vector<MatchResult> field_scan(const DatasetDescriptor& dataset,
                                    std::uint32_t column, const NormalizedKey& key,
                                    bool early_exit, ScanStats* stats) {
  const auto t0 = SteadyClock::now();
  std::vector<MatchResult> results;
  std::uint64_t rows_scanned = 0;
  std::uint64_t malformed = 0;
  std::uint64_t non_integer = 0;
  std::uint64_t bytes = 0;

  std::optional<std::uint64_t> key_int;
  if (key.kind == KeyKind::integer) key_int = parse_u64_field(key.value);
  const bool inert = key.value.empty() || (key.kind == KeyKind::integer && !key_int);

  if (!inert) {
    csv::LineScanner scanner(dataset.path);
    bool skip_header = dataset.has_header;
    std::uint64_t data_row = 0;
    std::vector<csv::FieldRef> refs;
    std::string scratch;
    while (auto line = scanner.next()) {
      if (skip_header) {
        skip_header = false;
        continue;
      }
      ++data_row;
      ++rows_scanned;
      try {
        csv::split_fields(line->bytes, dataset.dialect, refs);
      } catch (const csv::MalformedRow&) {
        ++malformed;
        continue;
      }
      if (column >= refs.size()) continue;
      std::string_view fv = csv::field_value(refs[column], dataset.dialect, scratch);
      bool match = false;
      switch (key.kind) {
        case KeyKind::email:
          match = scalar_normalize_email(fv) == key.value;
          break;
        case KeyKind::phone:
          match = scalar_normalize_phone(fv) == key.value;
          break;
        case KeyKind::integer: {
          auto v = parse_u64_field(fv);
          if (!v) ++non_integer;
          match = v && *v == *key_int;
          break;
        }
        case KeyKind::verbatim:
          match = fv == key.value;
          break;
      }
      if (!match) continue;
      MatchResult m;
      m.record.row_number = data_row;
      m.record.byte_offset = line->byte_offset;
      m.record.fields.reserve(refs.size());
      std::string field_scratch;
      for (const auto& ref : refs) {
        m.record.fields.emplace_back(
            csv::field_value(ref, dataset.dialect, field_scratch));
      }
      m.matched_column = column;
      m.strategy = Strategy::field_scan;
      results.push_back(std::move(m));
      if (early_exit) break;
    }
    bytes = scanner.bytes_consumed();
  }

  const double elapsed = seconds_since(t0);
  for (auto& m : results) {
    m.elapsed_s = elapsed;
    m.bytes_scanned = bytes;
  }
  if (stats) {
    stats->rows_scanned = rows_scanned;
    stats->malformed_skipped = malformed;
    stats->non_integer_fields = non_integer;
    stats->bytes_scanned = bytes;
    stats->elapsed_s = elapsed;
  }
  return results;
}

// ---------------------------------------------------------------------------
// chunked_scan

namespace {

struct WorkerMatch {
  std::uint64_t local_ordinal;  // 1-based line ordinal within the worker range
  std::uint64_t byte_offset;
  std::vector<std::string> fields;
};

struct WorkerOut {
  std::vector<WorkerMatch> matches;
  std::uint64_t rows = 0;
  std::uint64_t malformed = 0;
  std::exception_ptr error;
};

// Line-start-aligned partition boundaries tiling [data_start, file_size).
std::vector<std::uint64_t> partition_cuts(const File& file, std::uint64_t data_start,
                                          unsigned parts) {
  const std::uint64_t size = file.size();
  std::vector<std::uint64_t> cuts;
  cuts.push_back(data_start);
  if (size > data_start) {
    const std::uint64_t span = size - data_start;
    std::vector<char> window(64 << 10);
    for (unsigned i = 1; i < parts; ++i) {
      std::uint64_t raw = data_start + span * i / parts;
      if (raw <= cuts.back()) continue;
      // A cut must be a line start: the byte after the first newline at or
      // past raw-1.
      std::uint64_t probe = raw - 1;
      std::uint64_t cut = size;
      while (probe < size) {
        std::size_t got = file.pread(window.data(), window.size(), probe);
        if (got == 0) break;
        std::size_t nl = kernels::find_byte(window.data(), got, '\n');
        if (nl < got) {
          cut = probe + nl + 1;
          break;
        }
        probe += got;
      }
      if (cut > size) cut = size;
      if (cut > cuts.back() && cut < size) cuts.push_back(cut);
    }
  }
  cuts.push_back(size);
  return cuts;
}

void chunked_worker(const std::filesystem::path& path, const CsvDialect& dialect,
                    std::uint32_t column, const KeyProbe& probe,
                    std::size_t chunk_rows, std::uint64_t begin, std::uint64_t end,
                    WorkerOut& out) {
  try {
    csv::ChunkedLineReader reader(path, chunk_rows, begin, end, 1);
    std::string scratch;
    while (const auto* chunk = reader.next()) {
      for (const auto& line : chunk->lines) {
        ++out.rows;
        try {
          auto ref = csv::field_at(line.bytes, dialect, column);
          if (!ref) continue;
          std::string_view fv = csv::field_value(*ref, dialect, scratch);
          if (!probe.matches(fv)) continue;
          WorkerMatch match;
          match.local_ordinal = out.rows;
          match.byte_offset = line.byte_offset;
          try {
            match.fields = csv::parse_row(line.bytes, dialect);
          } catch (const csv::MalformedRow&) {
            match.fields = {std::string(line.bytes)};
          }
          out.matches.push_back(std::move(match));
        } catch (const csv::MalformedRow&) {
          ++out.malformed;
        }
      }
    }
  } catch (...) {
    out.error = std::current_exception();
  }
}

}  // namespace

std::vector<MatchResult> chunked_scan(const DatasetDescriptor& dataset,
                                      std::uint32_t column, const NormalizedKey& key,
                                      ChunkedScanOptions options, ScanStats* stats) {
  const auto t0 = SteadyClock::now();
  std::vector<MatchResult> results;
  const KeyProbe probe(key);
  std::uint64_t rows_scanned = 0;
  std::uint64_t malformed = 0;
  std::uint64_t bytes = 0;

  if (!probe.never_matches()) {
    const File file(dataset.path);
    const std::uint64_t data_start = csv::data_start_offset(dataset);
    unsigned threads = options.threads;
    if (threads == 0) {
      threads = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
    }
    // No point spawning workers for tiny ranges.
    const std::uint64_t span = file.size() > data_start ? file.size() - data_start : 0;
    threads = static_cast<unsigned>(
        std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, span / (1 << 16) + 1)));

    const auto cuts = partition_cuts(file, data_start, threads);
    const std::size_t workers = cuts.size() - 1;
    const std::size_t budget =
        std::max<std::size_t>(1, options.chunk_rows / std::max<std::size_t>(workers, 1));

    std::vector<WorkerOut> outs(workers);
    if (workers == 1) {
      chunked_worker(dataset.path, dataset.dialect, column, probe, budget, cuts[0],
                     cuts[1], outs[0]);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(chunked_worker, std::cref(dataset.path),
                          std::cref(dataset.dialect), column, std::cref(probe), budget,
                          cuts[w], cuts[w + 1], std::ref(outs[w]));
      }
      for (auto& t : pool) t.join();
    }

    std::uint64_t row_base = 0;
    for (auto& out : outs) {
      if (out.error) std::rethrow_exception(out.error);
      for (auto& wm : out.matches) {
        MatchResult m;
        m.record.row_number = row_base + wm.local_ordinal;
        m.record.byte_offset = wm.byte_offset;
        m.record.fields = std::move(wm.fields);
        m.matched_column = column;
        m.strategy = Strategy::chunked_scan;
        results.push_back(std::move(m));
      }
      row_base += out.rows;
      rows_scanned += out.rows;
      malformed += out.malformed;
    }
    bytes = file.size();
  }

  const double elapsed = seconds_since(t0);
  for (auto& m : results) {
    m.elapsed_s = elapsed;
    m.bytes_scanned = bytes;
  }
  if (stats) {
    stats->rows_scanned = rows_scanned;
    stats->malformed_skipped = malformed;
    stats->bytes_scanned = bytes;
    stats->elapsed_s = elapsed;
  }
  return results;
}

}  // namespace brix::scan
