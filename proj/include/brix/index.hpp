#pragma once

// Persistent on-disk indexes with a bit-exact little-endian format:
//
//   magic[4]="BRIX"  version u16  kind u8  key_kind u8  column u16
//   reserved[2]      entry_count u64  size u64  mtime u64  digest[32]
//
// followed by entries: u64 offsets (row-offset index) or sorted
// (u64 key_hash, u64 byte_offset) pairs (key index). Loading validates
// magic, version, kind and the source-file fingerprint; stale indexes are
// rejected, never rebuilt silently.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

#include "brix/core.hpp"
#include "brix/file.hpp"

namespace brix::index {

inline constexpr char kMagic[4] = {'B', 'R', 'I', 'X'};
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 68;

enum class IndexKind : std::uint8_t { row_offset = 1, key = 2 };

struct IndexHeader {
  std::uint16_t version = kFormatVersion;
  IndexKind kind = IndexKind::row_offset;
  std::uint8_t key_kind = 0;  // KeyKind code; 0 for row_offset
  std::uint16_t column = 0;   // 0 for row_offset
  std::uint64_t entry_count = 0;
  Fingerprint fingerprint;
};

enum class IndexErrorCode : std::uint8_t {
  bad_magic,
  version_mismatch,
  stale_index,
  truncated,
  wrong_kind,
  out_of_range,
  io,
};

struct IndexError : std::runtime_error {
  IndexError(IndexErrorCode c, const std::string& msg)
      : std::runtime_error(msg), code(c) {}
  IndexErrorCode code;
};

const char* index_error_name(IndexErrorCode code);

struct BuildResult {
  std::filesystem::path path;
  std::uint64_t entries = 0;
  std::uint64_t malformed_skipped = 0;
  std::uint64_t empty_keys_skipped = 0;  // key index only
};

struct KeyIndexBuildOptions {
  // In-memory sort budget; above it the build spills sorted runs to disk
  // and merges them pairwise.
  std::size_t memory_budget_bytes = 512ull << 20;
};

// One sequential pass; entry per data row in row order; atomic publish via
// temp file + rename. Malformed rows are skipped and counted.
BuildResult build_row_offset_index(const DatasetDescriptor& dataset,
                                   const std::filesystem::path& out_path);

// One scan + sort; entry per row whose normalized field is non-empty,
// sorted by (key_hash, byte_offset). Duplicates are preserved.
BuildResult build_key_index(const DatasetDescriptor& dataset, std::uint32_t column,
                            KeyKind key_kind, const std::filesystem::path& out_path,
                            KeyIndexBuildOptions options = {});

// Header-only read with magic/version/length validation; no staleness
// check (used by `inspect`).
IndexHeader read_index_header(const std::filesystem::path& path);

// Validated, read-only handle doing pread-style random access into the
// index file; never loads the entry array wholesale.
class IndexHandle {
 public:
  const IndexHeader& header() const { return header_; }
  const std::filesystem::path& path() const { return file_.path(); }

  // O(1): one index read. Rows are 1-based; OutOfRange outside
  // [1, entry_count].
  std::uint64_t lookup_row(std::uint64_t row_number) const;

  // Binary search over the hash, then verification of every candidate
  // against the source record (collisions never leak). Returns verified
  // record offsets in ascending order.
  std::vector<std::uint64_t> lookup_key(const NormalizedKey& key,
                                        const File& dataset_file,
                                        const CsvDialect& dialect) const;
  std::vector<std::uint64_t> lookup_key(const NormalizedKey& key,
                                        const DatasetDescriptor& dataset) const;

 private:
  friend IndexHandle load_index(const std::filesystem::path&,
                                const DatasetDescriptor&);
  IndexHandle(File file, IndexHeader header)
      : file_(std::move(file)), header_(header) {}

  // Entry accessors (instrumented as index reads).
  std::uint64_t offset_entry(std::uint64_t i) const;
  std::pair<std::uint64_t, std::uint64_t> key_entry(std::uint64_t i) const;

  File file_;
  IndexHeader header_;
};

// Validates magic, version and fingerprint against the dataset; throws
// IndexError with a distinct code per failure mode.
IndexHandle load_index(const std::filesystem::path& path,
                       const DatasetDescriptor& dataset);

// Conventional layout: "<corpus>.brix.d/" holding rows.brix and
// key_<kind>_<column>.brix.
std::filesystem::path default_index_dir(const std::filesystem::path& corpus);
std::filesystem::path row_index_path(const std::filesystem::path& index_dir);
std::filesystem::path key_index_path(const std::filesystem::path& index_dir,
                                     KeyKind kind, std::uint32_t column);

}  // namespace brix::index
