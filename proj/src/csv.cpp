#include "brix/csv.hpp"

#include <algorithm>
#include <cstring>

#include "brix/instrumentation.hpp"
#include "brix/kernels.hpp"

namespace brix::csv {

// ---------------------------------------------------------------------------
// LineScanner

LineScanner::LineScanner(const std::filesystem::path& path, std::size_t buffer_bytes)
    : LineScanner(path, 0, std::numeric_limits<std::uint64_t>::max(), buffer_bytes) {}

LineScanner::LineScanner(const std::filesystem::path& path, std::uint64_t start_offset,
                         std::uint64_t end_offset, std::size_t buffer_bytes)
    : file_(path),
      buffer_(std::max<std::size_t>(buffer_bytes, 4096)),
      next_offset_(start_offset),
      end_offset_(end_offset),
      consumed_(start_offset) {}

bool LineScanner::refill() {
  if (eof_) return false;
  std::size_t got = file_.pread(buffer_.data(), buffer_.size(), next_offset_);
  if (got == 0) {
    eof_ = true;
    return false;
  }
  buf_pos_ = 0;
  buf_len_ = got;
  return true;
}

std::optional<LineScanner::Line> LineScanner::next() {
  if (carry_consumed_) {
    carry_.clear();
    carry_consumed_ = false;
  }
  const std::uint64_t line_start = next_offset_ - carry_.size();
  if (carry_.empty() && line_start >= end_offset_) return std::nullopt;

  for (;;) {
    if (buf_pos_ < buf_len_) {
      const char* base = buffer_.data() + buf_pos_;
      const std::size_t avail = buf_len_ - buf_pos_;
      const std::size_t rel = kernels::find_byte(base, avail, '\n');
      if (rel < avail) {
        std::string_view content;
        if (carry_.empty()) {
          content = std::string_view(base, rel);
        } else {
          carry_.append(base, rel);
          content = carry_;
          carry_consumed_ = true;
        }
        std::uint8_t term_len = 1;
        if (!content.empty() && content.back() == '\r') {
          content.remove_suffix(1);
          term_len = 2;
        }
        buf_pos_ += rel + 1;
        next_offset_ += rel + 1;
        consumed_ = line_start + content.size() + term_len;
        return Line{++line_no_, line_start, content, term_len};
      }
      carry_.append(base, avail);
      next_offset_ += avail;
      buf_pos_ = buf_len_;
    }
    if (!refill()) {
      if (carry_.empty()) return std::nullopt;
      std::string_view content = carry_;
      carry_consumed_ = true;
      consumed_ = line_start + content.size();
      return Line{++line_no_, line_start, content, 0};
    }
  }
}

// ---------------------------------------------------------------------------
// Field splitting

namespace {

// Walks one quoted field starting at line[pos] (the opening quote).
// Returns the index one past the closing quote.
std::size_t scan_quoted(std::string_view line, std::size_t pos, char quote) {
  std::size_t i = pos + 1;
  for (;;) {
    std::size_t rel = kernels::find_byte(line.data() + i, line.size() - i,
                                         static_cast<std::uint8_t>(quote));
    std::size_t q = i + rel;
    if (q >= line.size()) {
      throw MalformedRow("unbalanced quote");
    }
    if (q + 1 < line.size() && line[q + 1] == quote) {
      i = q + 2;  // doubled quote: escaped, keep scanning
      continue;
    }
    return q + 1;
  }
}

}  // namespace

void split_fields(std::string_view line, const CsvDialect& dialect,
                  std::vector<FieldRef>& out) {
  out.clear();
  const char delim = dialect.delimiter;
  const char quote = dialect.quote;
  std::size_t pos = 0;
  for (;;) {
    if (pos < line.size() && line[pos] == quote) {
      std::size_t end = scan_quoted(line, pos, quote);
      out.push_back({line.substr(pos, end - pos), true});
      if (end == line.size()) return;
      if (line[end] != delim) {
        throw MalformedRow("unexpected byte after closing quote");
      }
      pos = end + 1;
    } else {
      std::size_t rel = kernels::find_byte(line.data() + pos, line.size() - pos,
                                           static_cast<std::uint8_t>(delim));
      std::size_t d = pos + rel;
      out.push_back({line.substr(pos, d - pos), false});
      if (d == line.size()) return;
      pos = d + 1;
    }
  }
}

std::optional<FieldRef> field_at(std::string_view line, const CsvDialect& dialect,
                                 std::uint32_t column) {
  const char delim = dialect.delimiter;
  const char quote = dialect.quote;
  std::size_t pos = 0;
  for (std::uint32_t idx = 0;; ++idx) {
    if (pos < line.size() && line[pos] == quote) {
      std::size_t end = scan_quoted(line, pos, quote);
      if (idx == column) return FieldRef{line.substr(pos, end - pos), true};
      if (end == line.size()) return std::nullopt;
      if (line[end] != delim) {
        throw MalformedRow("unexpected byte after closing quote");
      }
      pos = end + 1;
    } else {
      std::size_t rel = kernels::find_byte(line.data() + pos, line.size() - pos,
                                           static_cast<std::uint8_t>(delim));
      std::size_t d = pos + rel;
      if (idx == column) return FieldRef{line.substr(pos, d - pos), false};
      if (d == line.size()) return std::nullopt;
      pos = d + 1;
    }
  }
}

std::string_view field_value(const FieldRef& field, const CsvDialect& dialect,
                             std::string& scratch) {
  if (!field.quoted) return field.raw;
  std::string_view inner = field.raw;
  inner.remove_prefix(1);
  inner.remove_suffix(1);
  if (kernels::find_byte(inner, dialect.quote) == inner.size()) {
    return inner;  // no embedded quotes, borrow directly
  }
  scratch.clear();
  for (std::size_t i = 0; i < inner.size(); ++i) {
    scratch.push_back(inner[i]);
    if (inner[i] == dialect.quote) ++i;  // collapse the doubling
  }
  return scratch;
}

std::vector<std::string> parse_row(std::string_view line, const CsvDialect& dialect) {
  std::vector<FieldRef> refs;
  split_fields(line, dialect, refs);
  std::vector<std::string> fields;
  fields.reserve(refs.size());
  std::string scratch;
  for (const FieldRef& ref : refs) {
    fields.emplace_back(field_value(ref, dialect, scratch));
  }
  return fields;
}

std::string write_row(std::span<const std::string> fields, const CsvDialect& dialect) {
  std::string out;
  const char special[4] = {dialect.delimiter, dialect.quote, '\n', '\r'};
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i != 0) out.push_back(dialect.delimiter);
    const std::string& f = fields[i];
    const bool needs_quote =
        f.find_first_of(std::string_view(special, 4)) != std::string::npos;
    if (!needs_quote) {
      out.append(f);
      continue;
    }
    out.push_back(dialect.quote);
    for (char c : f) {
      out.push_back(c);
      if (c == dialect.quote) out.push_back(dialect.quote);
    }
    out.push_back(dialect.quote);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Row counting and random access

std::uint64_t count_rows(const std::filesystem::path& path, const CsvDialect&,
                         bool has_header) {
  File file(path);
  std::vector<char> buffer(1 << 20);
  std::uint64_t offset = 0;
  std::uint64_t newlines = 0;
  char last = '\n';
  for (;;) {
    std::size_t got = file.pread(buffer.data(), buffer.size(), offset);
    if (got == 0) break;
    newlines += kernels::count_byte(buffer.data(), got, '\n');
    last = buffer[got - 1];
    offset += got;
  }
  std::uint64_t lines = newlines + (last != '\n' ? 1 : 0);
  if (has_header && lines > 0) --lines;
  return lines;
}

RawRecord row_at_offset(const File& file, std::uint64_t byte_offset,
                        const CsvDialect& dialect, std::uint64_t row_number) {
  if (byte_offset >= file.size()) {
    throw OffsetBeyondEof("offset " + std::to_string(byte_offset) +
                          " beyond end of " + file.path().string());
  }
  instr::count_record_read();
  std::string buf;
  std::size_t want = 4096;
  for (;;) {
    buf.resize(want);
    std::size_t got = file.pread(buf.data(), want, byte_offset);
    buf.resize(got);
    std::size_t nl = kernels::find_byte(buf.data(), got, '\n');
    if (nl < got || byte_offset + got >= file.size()) {
      std::string_view line(buf.data(), std::min(nl, got));
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      RawRecord record;
      record.row_number = row_number;
      record.byte_offset = byte_offset;
      record.fields = parse_row(line, dialect);
      return record;
    }
    want *= 2;
  }
}

RawRecord row_at_offset(const std::filesystem::path& path, std::uint64_t byte_offset,
                        const CsvDialect& dialect, std::uint64_t row_number) {
  File file(path);
  return row_at_offset(file, byte_offset, dialect, row_number);
}

// ---------------------------------------------------------------------------
// ChunkedLineReader

namespace {

std::size_t chunk_buffer_bytes(std::size_t chunk_rows) {
  return std::clamp<std::size_t>(chunk_rows * 64, 64 << 10, 4 << 20);
}

}  // namespace

ChunkedLineReader::ChunkedLineReader(const std::filesystem::path& path,
                                     std::size_t chunk_rows)
    : ChunkedLineReader(path, chunk_rows, 0,
                        std::numeric_limits<std::uint64_t>::max(), 1) {}

ChunkedLineReader::ChunkedLineReader(const std::filesystem::path& path,
                                     std::size_t chunk_rows, std::uint64_t start_offset,
                                     std::uint64_t end_offset,
                                     std::uint64_t first_line_number)
    : file_(path),
      buf_(chunk_buffer_bytes(chunk_rows)),
      win_off_(start_offset),
      read_off_(start_offset),
      end_off_(end_offset),
      chunk_rows_(std::max<std::size_t>(chunk_rows, 1)),
      next_line_number_(first_line_number) {
  lines_.reserve(chunk_rows_);
}

ChunkedLineReader::~ChunkedLineReader() { release_current(); }

void ChunkedLineReader::release_current() {
  if (!lines_.empty()) {
    instr::track_buffered(-static_cast<std::int64_t>(lines_.size()),
                          -tracked_bytes_);
    lines_.clear();
    tracked_bytes_ = 0;
  }
}

const ChunkedLineReader::ChunkView* ChunkedLineReader::next() {
  release_current();
  if (done_) return nullptr;
  std::uint64_t bytes_spanned = 0;
  std::int64_t content_bytes = 0;
  while (lines_.size() < chunk_rows_) {
    const std::uint64_t line_start = win_off_ + pos_;
    if (line_start >= end_off_) {
      done_ = true;
      break;
    }
    const std::size_t avail = buf_len_ - pos_;
    const std::size_t rel = kernels::find_byte(buf_.data() + pos_, avail, '\n');
    if (rel < avail) {
      std::string_view content(buf_.data() + pos_, rel);
      if (!content.empty() && content.back() == '\r') content.remove_suffix(1);
      lines_.push_back({line_start, content});
      bytes_spanned += rel + 1;
      content_bytes += static_cast<std::int64_t>(content.size());
      pos_ += rel + 1;
      continue;
    }
    if (read_off_ >= file_.size()) {
      if (pos_ < buf_len_) {
        std::string_view content(buf_.data() + pos_, buf_len_ - pos_);
        lines_.push_back({line_start, content});
        bytes_spanned += content.size();
        content_bytes += static_cast<std::int64_t>(content.size());
        pos_ = buf_len_;
      }
      done_ = true;
      break;
    }
    // Need more bytes. Refilling moves the window, which would invalidate
    // the views collected so far: yield a short chunk first.
    if (!lines_.empty()) break;
    const std::size_t tail = buf_len_ - pos_;
    std::memmove(buf_.data(), buf_.data() + pos_, tail);
    win_off_ += pos_;
    pos_ = 0;
    buf_len_ = tail;
    if (buf_len_ == buf_.size()) {
      buf_.resize(buf_.size() * 2);  // line longer than the window
    }
    std::size_t got = file_.pread(buf_.data() + buf_len_, buf_.size() - buf_len_,
                                  read_off_);
    read_off_ += got;
    buf_len_ += got;
  }
  if (lines_.empty()) {
    done_ = true;
    return nullptr;
  }
  tracked_bytes_ = content_bytes;
  instr::track_buffered(static_cast<std::int64_t>(lines_.size()), tracked_bytes_);
  view_.first_line_number = next_line_number_;
  view_.lines = lines_;
  view_.bytes_spanned = bytes_spanned;
  next_line_number_ += lines_.size();
  return &view_;
}

// ---------------------------------------------------------------------------
// ChunkReader

ChunkReader::ChunkReader(const DatasetDescriptor& dataset, std::size_t chunk_rows,
                         MalformedPolicy policy, std::uint64_t end_offset)
    : scanner_(dataset.path, 0, end_offset),
      dialect_(dataset.dialect),
      policy_(policy),
      chunk_rows_(std::max<std::size_t>(chunk_rows, 1)),
      skip_header_(dataset.has_header) {}

std::optional<RecordChunk> ChunkReader::next() {
  if (skip_header_) {
    scanner_.next();
    skip_header_ = false;
  }
  RecordChunk chunk;
  chunk.records.reserve(chunk_rows_);
  std::int64_t tracked_bytes = 0;
  while (chunk.records.size() < chunk_rows_) {
    auto line = scanner_.next();
    if (!line) break;
    try {
      RawRecord record;
      record.row_number = next_row_number_;
      record.byte_offset = line->byte_offset;
      record.fields = parse_row(line->bytes, dialect_);
      if (chunk.records.empty()) chunk.first_row_number = next_row_number_;
      ++next_row_number_;
      chunk.bytes_spanned += line->bytes.size() + line->terminator_len;
      tracked_bytes += static_cast<std::int64_t>(line->bytes.size());
      chunk.records.push_back(std::move(record));
    } catch (const MalformedRow&) {
      if (policy_ == MalformedPolicy::throw_error) throw;
      ++malformed_skipped_;
    }
  }
  if (chunk.records.empty()) return std::nullopt;
  // Register the batch's high-water mark, then hand ownership to the
  // caller; the reader itself buffers nothing between calls.
  const auto n = static_cast<std::int64_t>(chunk.records.size());
  instr::track_buffered(n, tracked_bytes);
  instr::track_buffered(-n, -tracked_bytes);
  return chunk;
}

// ---------------------------------------------------------------------------
// Dataset helpers

std::uint64_t data_start_offset(const DatasetDescriptor& dataset) {
  if (!dataset.has_header) return 0;
  LineScanner scanner(dataset.path, 1 << 16);
  auto header = scanner.next();
  if (!header) return 0;
  return header->bytes.size() + header->terminator_len;
}

DatasetDescriptor describe_dataset(const std::filesystem::path& path,
                                   const CsvDialect& dialect, bool has_header) {
  if (dialect.delimiter == dialect.quote) {
    throw std::invalid_argument("dialect delimiter must differ from its quote");
  }
  DatasetDescriptor d;
  d.path = path;
  d.dialect = dialect;
  d.has_header = has_header;
  d.fingerprint = fingerprint_dataset(path);
  d.size_bytes = d.fingerprint.size_bytes;
  d.row_count = count_rows(path, dialect, has_header);
  d.column_count = 1;
  LineScanner scanner(path, 1 << 16);
  if (auto first = scanner.next()) {
    std::vector<FieldRef> refs;
    try {
      split_fields(first->bytes, dialect, refs);
      d.column_count =
          static_cast<std::uint32_t>(std::max<std::size_t>(refs.size(), 1));
    } catch (const MalformedRow&) {
      d.column_count = 1;
    }
  }
  return d;
}

}  // namespace brix::csv
