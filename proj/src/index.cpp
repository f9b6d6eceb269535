#include "brix/index.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <utility>

#include "brix/csv.hpp"
#include "brix/instrumentation.hpp"

namespace brix::index {

const char* index_error_name(IndexErrorCode code) {
  switch (code) {
    case IndexErrorCode::bad_magic:
      return "BAD_MAGIC";
    case IndexErrorCode::version_mismatch:
      return "VERSION_MISMATCH";
    case IndexErrorCode::stale_index:
      return "STALE_INDEX";
    case IndexErrorCode::truncated:
      return "TRUNCATED_INDEX";
    case IndexErrorCode::wrong_kind:
      return "WRONG_KIND";
    case IndexErrorCode::out_of_range:
      return "OUT_OF_RANGE";
    case IndexErrorCode::io:
      return "IO";
  }
  return "UNKNOWN";
}

// ---------------------------------------------------------------------------
// Little-endian (de)serialization; the byte layout is the compatibility
// contract, so nothing here depends on host endianness.

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::string encode_header(const IndexHeader& h) {
  std::string out;
  out.reserve(kHeaderBytes);
  out.append(kMagic, sizeof(kMagic));
  put_u16(out, h.version);
  out.push_back(static_cast<char>(h.kind));
  out.push_back(static_cast<char>(h.key_kind));
  put_u16(out, h.column);
  out.push_back('\0');
  out.push_back('\0');
  put_u64(out, h.entry_count);
  put_u64(out, h.fingerprint.size_bytes);
  put_u64(out, h.fingerprint.modified_time);
  out.append(reinterpret_cast<const char*>(h.fingerprint.head_digest.data()),
             h.fingerprint.head_digest.size());
  return out;
}

std::size_t entry_bytes(IndexKind kind) {
  return kind == IndexKind::row_offset ? 8 : 16;
}

std::filesystem::path temp_path(const std::filesystem::path& out, const char* tag) {
  return out.string() + "." + tag + "." + std::to_string(::getpid());
}

void write_all(std::ofstream& out, std::string_view bytes,
               const std::filesystem::path& path) {
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace

// ---------------------------------------------------------------------------
// Builders

BuildResult build_row_offset_index(const DatasetDescriptor& dataset,
                                   const std::filesystem::path& out_path) {
  const Fingerprint fp = fingerprint_dataset(dataset.path);
  const auto tmp = temp_path(out_path, "tmp");
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + tmp.string());

  std::string buffer(kHeaderBytes, '\0');  // header placeholder
  BuildResult result;
  result.path = out_path;

  csv::LineScanner scanner(dataset.path);
  bool skip_header = dataset.has_header;
  std::vector<csv::FieldRef> refs;
  while (auto line = scanner.next()) {
    if (skip_header) {
      skip_header = false;
      continue;
    }
    try {
      csv::split_fields(line->bytes, dataset.dialect, refs);
    } catch (const csv::MalformedRow&) {
      ++result.malformed_skipped;
      continue;
    }
    put_u64(buffer, line->byte_offset);
    ++result.entries;
    if (buffer.size() >= (1 << 20)) {
      write_all(out, buffer, tmp);
      buffer.clear();
    }
  }
  write_all(out, buffer, tmp);

  IndexHeader header;
  header.kind = IndexKind::row_offset;
  header.entry_count = result.entries;
  header.fingerprint = fp;
  out.seekp(0);
  write_all(out, encode_header(header), tmp);
  out.close();
  if (!out) throw IoError("close failed on " + tmp.string());
  std::filesystem::rename(tmp, out_path);
  return result;
}

namespace {

using KeyEntry = std::pair<std::uint64_t, std::uint64_t>;  // (hash, offset)

void append_entry(std::string& buffer, const KeyEntry& e) {
  put_u64(buffer, e.first);
  put_u64(buffer, e.second);
}

std::filesystem::path spill_run(std::vector<KeyEntry>& entries,
                                const std::filesystem::path& out_path,
                                unsigned run_id) {
  std::sort(entries.begin(), entries.end());
  auto path = temp_path(out_path, ("run" + std::to_string(run_id)).c_str());
  std::ofstream run(path, std::ios::binary | std::ios::trunc);
  if (!run) throw IoError("cannot create " + path.string());
  std::string buffer;
  buffer.reserve(1 << 20);
  for (const auto& e : entries) {
    append_entry(buffer, e);
    if (buffer.size() >= (1 << 20)) {
      write_all(run, buffer, path);
      buffer.clear();
    }
  }
  write_all(run, buffer, path);
  run.close();
  if (!run) throw IoError("close failed on " + path.string());
  entries.clear();
  return path;
}

// Streams sorted 16-byte entries off a run file.
class RunReader {
 public:
  explicit RunReader(const std::filesystem::path& path)
      : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw IoError("cannot open run " + path.string());
    advance();
  }

  bool valid() const { return valid_; }
  const KeyEntry& head() const { return head_; }

  void advance() {
    unsigned char raw[16];
    in_.read(reinterpret_cast<char*>(raw), sizeof(raw));
    if (in_.gcount() == 0) {
      valid_ = false;
      return;
    }
    if (in_.gcount() != sizeof(raw)) {
      throw IoError("short entry in run " + path_.string());
    }
    head_ = {get_u64(raw), get_u64(raw + 8)};
    valid_ = true;
  }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
  KeyEntry head_{};
  bool valid_ = false;
};

// Two-way merge of sorted runs a and b into a fresh run file.
std::filesystem::path merge_runs(const std::filesystem::path& a,
                                 const std::filesystem::path& b,
                                 const std::filesystem::path& out_path,
                                 unsigned run_id) {
  auto path = temp_path(out_path, ("merge" + std::to_string(run_id)).c_str());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  RunReader ra(a);
  RunReader rb(b);
  std::string buffer;
  buffer.reserve(1 << 20);
  while (ra.valid() || rb.valid()) {
    RunReader* take;
    if (!rb.valid() || (ra.valid() && ra.head() <= rb.head())) {
      take = &ra;
    } else {
      take = &rb;
    }
    append_entry(buffer, take->head());
    take->advance();
    if (buffer.size() >= (1 << 20)) {
      write_all(out, buffer, path);
      buffer.clear();
    }
  }
  write_all(out, buffer, path);
  out.close();
  if (!out) throw IoError("close failed on " + path.string());
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  return path;
}

}  // namespace

BuildResult build_key_index(const DatasetDescriptor& dataset, std::uint32_t column,
                            KeyKind key_kind, const std::filesystem::path& out_path,
                            KeyIndexBuildOptions options) {
  if (column > 0xFFFF) {
    throw std::invalid_argument("key index column exceeds the format's u16 range");
  }
  const Fingerprint fp = fingerprint_dataset(dataset.path);
  BuildResult result;
  result.path = out_path;

  const std::size_t max_in_memory =
      std::max<std::size_t>(options.memory_budget_bytes / sizeof(KeyEntry), 1024);
  std::vector<KeyEntry> entries;
  std::vector<std::filesystem::path> runs;
  unsigned run_id = 0;

  {
    csv::LineScanner scanner(dataset.path);
    bool skip_header = dataset.has_header;
    std::vector<csv::FieldRef> refs;
    std::string scratch;
    while (auto line = scanner.next()) {
      if (skip_header) {
        skip_header = false;
        continue;
      }
      try {
        csv::split_fields(line->bytes, dataset.dialect, refs);
      } catch (const csv::MalformedRow&) {
        ++result.malformed_skipped;
        continue;
      }
      if (column >= refs.size()) {
        ++result.empty_keys_skipped;
        continue;
      }
      std::string_view fv = csv::field_value(refs[column], dataset.dialect, scratch);
      auto key = make_key(key_kind, fv);
      if (!key || key->value.empty()) {
        ++result.empty_keys_skipped;
        continue;
      }
      entries.emplace_back(fnv1a64(key->value), line->byte_offset);
      ++result.entries;
      if (entries.size() >= max_in_memory) {
        runs.push_back(spill_run(entries, out_path, run_id++));
      }
    }
  }

  const auto tmp = temp_path(out_path, "tmp");
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + tmp.string());

  IndexHeader header;
  header.kind = IndexKind::key;
  header.key_kind = static_cast<std::uint8_t>(key_kind);
  header.column = static_cast<std::uint16_t>(column);
  header.entry_count = result.entries;
  header.fingerprint = fp;
  write_all(out, encode_header(header), tmp);

  if (runs.empty()) {
    std::sort(entries.begin(), entries.end());
    std::string buffer;
    buffer.reserve(1 << 20);
    for (const auto& e : entries) {
      append_entry(buffer, e);
      if (buffer.size() >= (1 << 20)) {
        write_all(out, buffer, tmp);
        buffer.clear();
      }
    }
    write_all(out, buffer, tmp);
  } else {
    if (!entries.empty()) {
      runs.push_back(spill_run(entries, out_path, run_id++));
    }
    while (runs.size() > 1) {
      auto merged = merge_runs(runs[0], runs[1], out_path, run_id++);
      runs.erase(runs.begin(), runs.begin() + 2);
      runs.push_back(merged);
    }
    std::ifstream final_run(runs[0], std::ios::binary);
    if (!final_run) throw IoError("cannot open run " + runs[0].string());
    std::vector<char> buffer(1 << 20);
    while (final_run) {
      final_run.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
      const auto got = final_run.gcount();
      if (got > 0) {
        out.write(buffer.data(), got);
        if (!out) throw IoError("write failed on " + tmp.string());
      }
    }
    std::filesystem::remove(runs[0]);
  }

  out.close();
  if (!out) throw IoError("close failed on " + tmp.string());
  std::filesystem::rename(tmp, out_path);
  return result;
}

// ---------------------------------------------------------------------------
// Loading and lookups

IndexHeader read_index_header(const std::filesystem::path& path) {
  File file(path);
  if (file.size() < kHeaderBytes) {
    throw IndexError(IndexErrorCode::truncated,
                     "index file shorter than its header: " + path.string());
  }
  unsigned char raw[kHeaderBytes];
  file.pread(raw, sizeof(raw), 0);
  if (std::memcmp(raw, kMagic, sizeof(kMagic)) != 0) {
    throw IndexError(IndexErrorCode::bad_magic, "bad magic in " + path.string());
  }
  IndexHeader h;
  h.version = get_u16(raw + 4);
  if (h.version != kFormatVersion) {
    throw IndexError(IndexErrorCode::version_mismatch,
                     "index version " + std::to_string(h.version) + " (want " +
                         std::to_string(kFormatVersion) + ") in " + path.string());
  }
  const std::uint8_t kind_byte = raw[6];
  if (kind_byte != static_cast<std::uint8_t>(IndexKind::row_offset) &&
      kind_byte != static_cast<std::uint8_t>(IndexKind::key)) {
    throw IndexError(IndexErrorCode::bad_magic,
                     "corrupt index kind in " + path.string());
  }
  h.kind = static_cast<IndexKind>(kind_byte);
  h.key_kind = raw[7];
  h.column = get_u16(raw + 8);
  h.entry_count = get_u64(raw + 12);
  h.fingerprint.size_bytes = get_u64(raw + 20);
  h.fingerprint.modified_time = get_u64(raw + 28);
  std::memcpy(h.fingerprint.head_digest.data(), raw + 36, 32);
  const std::uint64_t expected =
      kHeaderBytes + h.entry_count * entry_bytes(h.kind);
  if (file.size() != expected) {
    throw IndexError(IndexErrorCode::truncated,
                     "index length " + std::to_string(file.size()) + " != expected " +
                         std::to_string(expected) + " in " + path.string());
  }
  return h;
}

IndexHandle load_index(const std::filesystem::path& path,
                       const DatasetDescriptor& dataset) {
  IndexHeader header = read_index_header(path);
  const Fingerprint fresh = fingerprint_dataset(dataset.path);
  if (!(fresh == header.fingerprint)) {
    throw IndexError(IndexErrorCode::stale_index,
                     "index " + path.string() + " is stale for " +
                         dataset.path.string());
  }
  return IndexHandle(File(path), header);
}

std::uint64_t IndexHandle::offset_entry(std::uint64_t i) const {
  unsigned char raw[8];
  instr::count_index_read();
  if (file_.pread(raw, sizeof(raw), kHeaderBytes + i * 8) != sizeof(raw)) {
    throw IndexError(IndexErrorCode::io, "short entry read in " + path().string());
  }
  return get_u64(raw);
}

std::pair<std::uint64_t, std::uint64_t> IndexHandle::key_entry(std::uint64_t i) const {
  unsigned char raw[16];
  instr::count_index_read();
  if (file_.pread(raw, sizeof(raw), kHeaderBytes + i * 16) != sizeof(raw)) {
    throw IndexError(IndexErrorCode::io, "short entry read in " + path().string());
  }
  return {get_u64(raw), get_u64(raw + 8)};
}

std::uint64_t IndexHandle::lookup_row(std::uint64_t row_number) const {
  if (header_.kind != IndexKind::row_offset) {
    throw IndexError(IndexErrorCode::wrong_kind,
                     "lookup_row on a non-row-offset index: " + path().string());
  }
  if (row_number < 1 || row_number > header_.entry_count) {
    throw IndexError(IndexErrorCode::out_of_range,
                     "row " + std::to_string(row_number) + " outside [1, " +
                         std::to_string(header_.entry_count) + "]");
  }
  return offset_entry(row_number - 1);
}

std::vector<std::uint64_t> IndexHandle::lookup_key(const NormalizedKey& key,
                                                   const File& dataset_file,
                                                   const CsvDialect& dialect) const {
  if (header_.kind != IndexKind::key) {
    throw IndexError(IndexErrorCode::wrong_kind,
                     "lookup_key on a non-key index: " + path().string());
  }
  if (header_.key_kind != static_cast<std::uint8_t>(key.kind)) {
    throw IndexError(IndexErrorCode::wrong_kind,
                     std::string("key kind mismatch: index holds ") +
                         key_kind_name(static_cast<KeyKind>(header_.key_kind)) +
                         ", query is " + key_kind_name(key.kind));
  }
  std::vector<std::uint64_t> verified;
  if (key.value.empty()) return verified;  // empty keys match nothing

  const std::uint64_t hash = fnv1a64(key.value);
  std::uint64_t lo = 0;
  std::uint64_t hi = header_.entry_count;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (key_entry(mid).first < hash) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  for (std::uint64_t i = lo; i < header_.entry_count; ++i) {
    const auto [h, offset] = key_entry(i);
    if (h != hash) break;
    RawRecord record = csv::row_at_offset(dataset_file, offset, dialect);
    if (record.fields.size() <= header_.column) continue;
    auto candidate = make_key(key.kind, record.fields[header_.column]);
    if (candidate && candidate->value == key.value) {
      verified.push_back(offset);
    }
  }
  return verified;
}

std::vector<std::uint64_t> IndexHandle::lookup_key(
    const NormalizedKey& key, const DatasetDescriptor& dataset) const {
  File file(dataset.path);
  return lookup_key(key, file, dataset.dialect);
}

// ---------------------------------------------------------------------------
// Layout helpers

std::filesystem::path default_index_dir(const std::filesystem::path& corpus) {
  return std::filesystem::path(corpus.string() + ".brix.d");
}

std::filesystem::path row_index_path(const std::filesystem::path& index_dir) {
  return index_dir / "rows.brix";
}

std::filesystem::path key_index_path(const std::filesystem::path& index_dir,
                                     KeyKind kind, std::uint32_t column) {
  return index_dir / ("key_" + std::string(key_kind_name(kind)) + "_" +
                      std::to_string(column) + ".brix");
}

}  // namespace brix::index
