#pragma once

// Streaming, bounded-memory CSV access: line iteration with byte offsets,
// RFC-4180 row parsing (doubled-quote escapes, no embedded newlines),
// chunked record batches and offset-addressed random access.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "brix/core.hpp"
#include "brix/file.hpp"

namespace brix::csv {

struct MalformedRow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OffsetBeyondEof : IoError {
  using IoError::IoError;
};

// Pull-based line iterator. Yields every physical record in order with its
// byte offset; accepts LF and CRLF and tracks the terminator length per
// line so offsets stay exact. Returned views stay valid until the next
// call to next().
class LineScanner {
 public:
  struct Line {
    std::uint64_t row_number;     // physical line ordinal, 1-based
    std::uint64_t byte_offset;    // offset of the record's first byte
    std::string_view bytes;       // excludes the terminator
    std::uint8_t terminator_len;  // 0 (EOF), 1 (LF) or 2 (CRLF)
  };

  explicit LineScanner(const std::filesystem::path& path,
                       std::size_t buffer_bytes = 1 << 20);
  // Yields only lines starting in [start_offset, end_offset); start must
  // be a record start. The final line may extend past end_offset.
  LineScanner(const std::filesystem::path& path, std::uint64_t start_offset,
              std::uint64_t end_offset, std::size_t buffer_bytes = 1 << 20);

  std::optional<Line> next();

  // Offset one past the last yielded line's terminator.
  std::uint64_t bytes_consumed() const { return consumed_; }
  std::uint64_t file_size() const { return file_.size(); }

 private:
  bool refill();

  File file_;
  std::vector<char> buffer_;
  std::string carry_;  // holds a line that straddles buffer boundaries
  bool carry_consumed_ = false;
  std::size_t buf_pos_ = 0;
  std::size_t buf_len_ = 0;
  std::uint64_t next_offset_ = 0;  // file offset of buffer_[buf_pos_]
  std::uint64_t end_offset_;
  std::uint64_t consumed_ = 0;
  std::uint64_t line_no_ = 0;
  bool eof_ = false;
};

// One field as found in the line: raw extent (quotes included) plus
// whether it was quoted and therefore may need unescaping.
struct FieldRef {
  std::string_view raw;
  bool quoted = false;
};

// Splits a full line into fields. Throws MalformedRow on an unbalanced
// quote (which is also how embedded newlines surface, since lines are
// framed before parsing). A quote not at field start is literal.
void split_fields(std::string_view line, const CsvDialect& dialect,
                  std::vector<FieldRef>& out);

// Extracts just one column, scanning only as far as needed. nullopt when
// the line has fewer than column+1 fields.
std::optional<FieldRef> field_at(std::string_view line, const CsvDialect& dialect,
                                 std::uint32_t column);

// Unescaped field value. Borrows from the line when possible; otherwise
// materializes into scratch.
std::string_view field_value(const FieldRef& field, const CsvDialect& dialect,
                             std::string& scratch);

std::vector<std::string> parse_row(std::string_view line, const CsvDialect& dialect);

// Serializes fields back to one CSV line in the given dialect (quoting
// only where required). No terminator appended.
std::string write_row(std::span<const std::string> fields, const CsvDialect& dialect);

// Number of data records; excludes the header line when has_header.
std::uint64_t count_rows(const std::filesystem::path& path, const CsvDialect& dialect,
                         bool has_header);

// Parses exactly one record starting at byte_offset. row_number is left 0
// (unknown) unless the caller supplies it. Counts one record read.
RawRecord row_at_offset(const File& file, std::uint64_t byte_offset,
                        const CsvDialect& dialect, std::uint64_t row_number = 0);
RawRecord row_at_offset(const std::filesystem::path& path, std::uint64_t byte_offset,
                        const CsvDialect& dialect, std::uint64_t row_number = 0);

// Low-level chunk machinery for the scan paths: frames up to chunk_rows
// lines at a time directly inside its read window, so chunks may come up
// short at window boundaries but never exceed chunk_rows. Live rows/bytes
// are tracked through instr::track_buffered, which is how the
// memory-bound contract is asserted.
class ChunkedLineReader {
 public:
  struct LineRef {
    std::uint64_t byte_offset;
    std::string_view bytes;  // terminator excluded
  };
  struct ChunkView {
    std::uint64_t first_line_number;  // physical ordinal of lines[0]
    std::span<const LineRef> lines;
    std::uint64_t bytes_spanned;  // terminators included
  };

  ChunkedLineReader(const std::filesystem::path& path, std::size_t chunk_rows);
  ChunkedLineReader(const std::filesystem::path& path, std::size_t chunk_rows,
                    std::uint64_t start_offset, std::uint64_t end_offset,
                    std::uint64_t first_line_number);
  ~ChunkedLineReader();

  // Valid until the next call. nullptr at end of range.
  const ChunkView* next();

 private:
  void release_current();

  File file_;
  std::vector<char> buf_;
  std::size_t buf_len_ = 0;
  std::size_t pos_ = 0;
  std::uint64_t win_off_ = 0;   // file offset of buf_[0]
  std::uint64_t read_off_ = 0;  // next offset to read
  std::uint64_t end_off_;
  std::vector<LineRef> lines_;
  ChunkView view_;
  std::size_t chunk_rows_;
  std::uint64_t next_line_number_;
  std::int64_t tracked_bytes_ = 0;
  bool done_ = false;
};

struct RecordChunk {
  std::uint64_t first_row_number = 0;  // data-row ordinal of records[0]
  std::vector<RawRecord> records;
  std::uint64_t bytes_spanned = 0;  // terminators included
};

enum class MalformedPolicy : std::uint8_t { throw_error, skip_and_count };

// Streaming batches of parsed records: every chunk except the last holds
// exactly chunk_rows records, and their concatenation equals the full
// sequential parse.
class ChunkReader {
 public:
  ChunkReader(const DatasetDescriptor& dataset, std::size_t chunk_rows,
              MalformedPolicy policy = MalformedPolicy::throw_error,
              std::uint64_t end_offset = std::numeric_limits<std::uint64_t>::max());

  std::optional<RecordChunk> next();

  std::uint64_t malformed_skipped() const { return malformed_skipped_; }
  std::uint64_t bytes_consumed() const { return scanner_.bytes_consumed(); }

 private:
  LineScanner scanner_;
  CsvDialect dialect_;
  MalformedPolicy policy_;
  std::size_t chunk_rows_;
  bool skip_header_;
  std::uint64_t next_row_number_ = 1;
  std::uint64_t malformed_skipped_ = 0;
};

// Offset of the first data record: 0, or the header line's length.
std::uint64_t data_start_offset(const DatasetDescriptor& dataset);

// Builds a descriptor by inspecting the file (one counting pass).
DatasetDescriptor describe_dataset(const std::filesystem::path& path,
                                   const CsvDialect& dialect, bool has_header);

}  // namespace brix::csv
