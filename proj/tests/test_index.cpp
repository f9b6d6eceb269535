#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/stat.h>

#include <algorithm>
#include <random>

#include "brix/csv.hpp"
#include "brix/datagen.hpp"
#include "brix/index.hpp"
#include "brix/instrumentation.hpp"
#include "brix/scan.hpp"
#include "helpers.hpp"

using namespace brix;

namespace {

// Independent little-endian encoders: the golden expectations are derived
// here, not via the library's serializer.
void le16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}
void le64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::string sha256_of(std::string_view bytes) {
  unsigned char digest[32];
  unsigned int len = 0;
  REQUIRE(EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                     nullptr) == 1);
  return std::string(reinterpret_cast<char*>(digest), 32);
}

void set_mtime(const std::filesystem::path& path, std::time_t seconds) {
  struct timespec times[2];
  times[0].tv_sec = seconds;
  times[0].tv_nsec = 0;
  times[1].tv_sec = seconds;
  times[1].tv_nsec = 0;
  REQUIRE(::utimensat(AT_FDCWD, path.c_str(), times, 0) == 0);
}

std::string expected_header(std::uint8_t kind, std::uint8_t key_kind,
                            std::uint16_t column, std::uint64_t entries,
                            std::uint64_t size, std::uint64_t mtime,
                            const std::string& digest) {
  std::string h = "BRIX";
  le16(h, 1);  // version
  h.push_back(static_cast<char>(kind));
  h.push_back(static_cast<char>(key_kind));
  le16(h, column);
  h.push_back('\0');
  h.push_back('\0');
  le64(h, entries);
  le64(h, size);
  le64(h, mtime);
  h += digest;
  REQUIRE(h.size() == 68);
  return h;
}

DatasetDescriptor generated(const testutil::TempDir& tmp, const std::string& name,
                            std::uint64_t rows, std::uint64_t seed,
                            std::vector<datagen::Plant> plants = {}) {
  datagen::GenSpec spec;
  spec.rows = rows;
  spec.columns = 10;
  spec.seed = seed;
  spec.email_column = 5;
  spec.phone_column = 7;
  spec.planted = std::move(plants);
  return datagen::generate_dataset(spec, tmp.path(name));
}

}  // namespace

TEST_CASE("index files are bit-exact against an independently derived golden") {
  testutil::TempDir tmp("idx_golden");
  const auto corpus = tmp.path("g.csv");
  const std::string content = "e,p\nx@y.z,111\nq@w.r,222\n";
  testutil::write_file(corpus, content);
  set_mtime(corpus, 1700000000);
  const auto dataset = csv::describe_dataset(corpus, CsvDialect{}, true);
  const std::string digest = sha256_of(content);

  SUBCASE("row-offset index") {
    const auto out = tmp.path("rows.brix");
    const auto result = index::build_row_offset_index(dataset, out);
    CHECK(result.entries == 2);
    std::string want =
        expected_header(1, 0, 0, 2, content.size(), 1700000000, digest);
    le64(want, 4);   // "x@y.z,111\n" starts after the 4-byte header line
    le64(want, 14);  // second data row
    CHECK(testutil::read_file(out) == want);
  }

  SUBCASE("key index sorted by (hash, offset)") {
    const auto out = tmp.path("key.brix");
    const auto result =
        index::build_key_index(dataset, 0, KeyKind::email, out);
    CHECK(result.entries == 2);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> entries = {
        {fnv1a64("x@y.z"), 4}, {fnv1a64("q@w.r"), 14}};
    std::sort(entries.begin(), entries.end());
    std::string want =
        expected_header(2, 1, 0, 2, content.size(), 1700000000, digest);
    for (const auto& [h, o] : entries) {
      le64(want, h);
      le64(want, o);
    }
    CHECK(testutil::read_file(out) == want);
  }
}

TEST_CASE("row-offset example: a\\nb\\nc\\n gives offsets 0,2,4") {
  testutil::TempDir tmp("idx_abc");
  const auto corpus = tmp.path("abc.csv");
  testutil::write_file(corpus, "a\nb\nc\n");
  const auto dataset = csv::describe_dataset(corpus, CsvDialect{}, false);
  const auto out = tmp.path("rows.brix");
  CHECK(index::build_row_offset_index(dataset, out).entries == 3);
  const auto handle = index::load_index(out, dataset);
  CHECK(handle.lookup_row(1) == 0);
  CHECK(handle.lookup_row(2) == 2);
  CHECK(handle.lookup_row(3) == 4);
}

TEST_CASE("row-offset entries reproduce the sequential parse") {
  testutil::TempDir tmp("idx_seq");
  const auto dataset = generated(tmp, "c.csv", 1000, 31);
  const auto out = tmp.path("rows.brix");
  const auto result = index::build_row_offset_index(dataset, out);
  CHECK(result.entries == 1000);
  CHECK(result.malformed_skipped == 0);
  const auto handle = index::load_index(out, dataset);

  File file(dataset.path);
  csv::LineScanner scanner(dataset.path);
  scanner.next();  // header
  std::uint64_t row = 0;
  while (auto line = scanner.next()) {
    ++row;
    const auto offset = handle.lookup_row(row);
    CHECK(offset == line->byte_offset);
    const auto record = csv::row_at_offset(file, offset, dataset.dialect, row);
    CHECK(record.fields == csv::parse_row(line->bytes, dataset.dialect));
  }
  CHECK(row == 1000);
}

TEST_CASE("empty dataset builds a valid zero-entry index") {
  testutil::TempDir tmp("idx_empty");
  const auto dataset = generated(tmp, "c.csv", 0, 1);
  const auto rows_out = tmp.path("rows.brix");
  CHECK(index::build_row_offset_index(dataset, rows_out).entries == 0);
  const auto handle = index::load_index(rows_out, dataset);
  CHECK(handle.header().entry_count == 0);
  CHECK_THROWS_AS(handle.lookup_row(1), index::IndexError);

  const auto key_out = tmp.path("key.brix");
  CHECK(index::build_key_index(dataset, 5, KeyKind::email, key_out).entries == 0);
  const auto khandle = index::load_index(key_out, dataset);
  CHECK(khandle.lookup_key(normalize_email("x@y.z"), dataset).empty());
}

TEST_CASE("load_index failure modes are distinct") {
  testutil::TempDir tmp("idx_errors");
  const auto dataset = generated(tmp, "c.csv", 20, 32);
  const auto out = tmp.path("rows.brix");
  index::build_row_offset_index(dataset, out);

  SUBCASE("build then load on an unchanged file succeeds") {
    CHECK_NOTHROW(index::load_index(out, dataset));
  }

  SUBCASE("bad magic") {
    auto bytes = testutil::read_file(out);
    bytes[0] = 'X';
    testutil::write_file(out, bytes);
    try {
      index::load_index(out, dataset);
      FAIL("expected IndexError");
    } catch (const index::IndexError& e) {
      CHECK(e.code == index::IndexErrorCode::bad_magic);
    }
  }

  SUBCASE("version mismatch") {
    auto bytes = testutil::read_file(out);
    bytes[4] = 9;
    testutil::write_file(out, bytes);
    try {
      index::load_index(out, dataset);
      FAIL("expected IndexError");
    } catch (const index::IndexError& e) {
      CHECK(e.code == index::IndexErrorCode::version_mismatch);
    }
  }

  SUBCASE("truncated entries") {
    auto bytes = testutil::read_file(out);
    bytes.resize(bytes.size() - 5);
    testutil::write_file(out, bytes);
    try {
      index::load_index(out, dataset);
      FAIL("expected IndexError");
    } catch (const index::IndexError& e) {
      CHECK(e.code == index::IndexErrorCode::truncated);
    }
  }

  SUBCASE("shorter than a header") {
    testutil::write_file(out, "BRI");
    try {
      index::load_index(out, dataset);
      FAIL("expected IndexError");
    } catch (const index::IndexError& e) {
      CHECK(e.code == index::IndexErrorCode::truncated);
    }
  }

  SUBCASE("modified corpus is stale") {
    auto content = testutil::read_file(dataset.path);
    testutil::write_file(dataset.path, content + "extra,row\n");
    try {
      index::load_index(out, dataset);
      FAIL("expected IndexError");
    } catch (const index::IndexError& e) {
      CHECK(e.code == index::IndexErrorCode::stale_index);
    }
  }
}

TEST_CASE("lookup_row bounds and O(1) access") {
  testutil::TempDir tmp("idx_bounds");
  const auto dataset = generated(tmp, "c.csv", 100, 33);
  const auto out = tmp.path("rows.brix");
  index::build_row_offset_index(dataset, out);
  const auto handle = index::load_index(out, dataset);

  instr::reset();
  const auto first = handle.lookup_row(1);
  CHECK(instr::index_reads() == 1);
  const auto last = handle.lookup_row(100);
  CHECK(instr::index_reads() == 2);
  CHECK(first < last);

  CHECK_THROWS_AS(handle.lookup_row(0), index::IndexError);
  CHECK_THROWS_AS(handle.lookup_row(101), index::IndexError);
  try {
    handle.lookup_row(101);
  } catch (const index::IndexError& e) {
    CHECK(e.code == index::IndexErrorCode::out_of_range);
  }
}

TEST_CASE("lookup_key finds planted keys and rejects absences cheaply") {
  testutil::TempDir tmp("idx_lookup");
  const auto dataset = generated(tmp, "c.csv", 500, 34,
                                 {{250, "hit@planted.example", "4242"}});
  const auto out = tmp.path("key.brix");
  index::build_key_index(dataset, 5, KeyKind::email, out);
  const auto handle = index::load_index(out, dataset);

  SUBCASE("planted unique email resolves to its row's offset") {
    const auto offsets = handle.lookup_key(normalize_email("hit@planted.example"),
                                           dataset);
    REQUIRE(offsets.size() == 1);
    const auto record = csv::row_at_offset(dataset.path, offsets[0], dataset.dialect);
    CHECK(record.fields[5] == "hit@planted.example");
  }

  SUBCASE("absent email reads no records at all") {
    instr::reset();
    const auto offsets =
        handle.lookup_key(normalize_email(datagen::absent_email()), dataset);
    CHECK(offsets.empty());
    CHECK(instr::record_reads() == 0);
    CHECK(instr::index_reads() <= 16);  // binary search over 500 entries
  }

  SUBCASE("position independence: one verified read per unique present key") {
    File file(dataset.path);
    for (std::uint64_t row : {1ull, 125ull, 375ull, 500ull}) {
      const auto key = normalize_email(datagen::generated_email(34, row));
      instr::reset();
      const auto offsets = handle.lookup_key(key, file, dataset.dialect);
      REQUIRE(offsets.size() == 1);
      CHECK(instr::record_reads() == 1);
    }
  }

  SUBCASE("empty key matches nothing") {
    CHECK(handle.lookup_key(normalize_email(""), dataset).empty());
  }

  SUBCASE("kind mismatch is reported") {
    try {
      handle.lookup_key(normalize_phone("123"), dataset);
      FAIL("expected IndexError");
    } catch (const index::IndexError& e) {
      CHECK(e.code == index::IndexErrorCode::wrong_kind);
    }
  }
}

TEST_CASE("duplicate keys keep every offset in ascending order") {
  testutil::TempDir tmp("idx_dupes");
  const auto dataset = generated(tmp, "c.csv", 100, 35,
                                 {{10, "dup@planted.example", "1"},
                                  {60, "dup@planted.example", "2"}});
  const auto out = tmp.path("key.brix");
  index::build_key_index(dataset, 5, KeyKind::email, out);
  const auto handle = index::load_index(out, dataset);
  const auto offsets = handle.lookup_key(normalize_email("dup@planted.example"),
                                         dataset);
  REQUIRE(offsets.size() == 2);
  CHECK(offsets[0] < offsets[1]);
}

TEST_CASE("forced hash collisions never leak through verification") {
  testutil::TempDir tmp("idx_collide");
  const auto corpus = tmp.path("c.csv");
  const std::string content = "e\none@x.y\ntwo@x.y\n";
  testutil::write_file(corpus, content);
  const auto dataset = csv::describe_dataset(corpus, CsvDialect{}, true);

  // Hand-craft an index claiming both rows hash to fnv("one@x.y").
  const std::uint64_t h = fnv1a64("one@x.y");
  std::string bytes = "BRIX";
  le16(bytes, 1);
  bytes.push_back(2);  // key index
  bytes.push_back(1);  // email
  le16(bytes, 0);      // column 0
  bytes.push_back('\0');
  bytes.push_back('\0');
  le64(bytes, 2);
  le64(bytes, dataset.fingerprint.size_bytes);
  le64(bytes, dataset.fingerprint.modified_time);
  bytes.append(reinterpret_cast<const char*>(dataset.fingerprint.head_digest.data()),
               32);
  le64(bytes, h);
  le64(bytes, 2);  // offset of "one@x.y"
  le64(bytes, h);
  le64(bytes, 10);  // offset of "two@x.y" lying about its hash
  const auto out = tmp.path("forged.brix");
  testutil::write_file(out, bytes);

  const auto handle = index::load_index(out, dataset);
  instr::reset();
  const auto offsets = handle.lookup_key(normalize_email("one@x.y"), dataset);
  REQUIRE(offsets.size() == 1);
  CHECK(offsets[0] == 2);
  CHECK(instr::record_reads() == 2);  // both candidates verified
}

TEST_CASE("external-merge spill produces a byte-identical index") {
  testutil::TempDir tmp("idx_spill");
  const auto dataset = generated(tmp, "c.csv", 5000, 36);

  const auto in_memory = tmp.path("mem.brix");
  index::build_key_index(dataset, 5, KeyKind::email, in_memory);

  const auto spilled = tmp.path("spill.brix");
  index::KeyIndexBuildOptions options;
  options.memory_budget_bytes = 1;  // floors at 1024 entries per run
  const auto result =
      index::build_key_index(dataset, 5, KeyKind::email, spilled, options);
  CHECK(result.entries == 5000);

  CHECK(testutil::read_file(in_memory) == testutil::read_file(spilled));
  // No stray run files left behind.
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(tmp.dir)) {
    (void)entry;
    ++files;
  }
  CHECK(files == 3);  // corpus + two indexes
}

TEST_CASE("empty and unparseable keys are skipped, not indexed") {
  testutil::TempDir tmp("idx_skip");
  const auto corpus = tmp.path("c.csv");
  testutil::write_file(corpus,
                       "e,p\n"
                       "a@b.c,123\n"
                       ",456\n"          // empty email
                       "d@e.f,xyz\n");   // unparseable integer
  const auto dataset = csv::describe_dataset(corpus, CsvDialect{}, true);

  const auto email_out = tmp.path("email.brix");
  const auto email_result =
      index::build_key_index(dataset, 0, KeyKind::email, email_out);
  CHECK(email_result.entries == 2);
  CHECK(email_result.empty_keys_skipped == 1);

  const auto int_out = tmp.path("int.brix");
  const auto int_result =
      index::build_key_index(dataset, 1, KeyKind::integer, int_out);
  CHECK(int_result.entries == 2);
  CHECK(int_result.empty_keys_skipped == 1);

  const auto handle = index::load_index(int_out, dataset);
  const auto offsets = handle.lookup_key(*normalize_integer("456"), dataset);
  CHECK(offsets.size() == 1);
}

TEST_CASE("lookup_key equals field_scan on random present/absent keys") {
  testutil::TempDir tmp("idx_oracle");
  const std::uint64_t seed = 37;
  const auto dataset = generated(tmp, "c.csv", 1000, seed);
  const auto out = tmp.path("key.brix");
  index::build_key_index(dataset, 5, KeyKind::email, out);
  const auto handle = index::load_index(out, dataset);
  File file(dataset.path);

  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    NormalizedKey key;
    if (i % 4 == 0) {
      key = normalize_email(datagen::absent_email(static_cast<unsigned>(i)));
    } else {
      key = normalize_email(
          datagen::generated_email(seed, 1 + rng() % 1000));
    }
    const auto via_index = handle.lookup_key(key, file, dataset.dialect);
    std::vector<std::uint64_t> via_scan;
    for (const auto& m : scan::field_scan(dataset, 5, key, false)) {
      via_scan.push_back(m.record.byte_offset);
    }
    CHECK(via_index == via_scan);
  }
}

TEST_CASE("read_index_header validates without a dataset") {
  testutil::TempDir tmp("idx_header");
  const auto dataset = generated(tmp, "c.csv", 10, 38);
  const auto out = tmp.path("key.brix");
  index::build_key_index(dataset, 5, KeyKind::email, out);
  const auto header = index::read_index_header(out);
  CHECK(header.kind == index::IndexKind::key);
  CHECK(header.key_kind == static_cast<std::uint8_t>(KeyKind::email));
  CHECK(header.column == 5);
  CHECK(header.entry_count == 10);
}

TEST_CASE("index path helpers") {
  CHECK(index::default_index_dir("/x/y.csv") == "/x/y.csv.brix.d");
  CHECK(index::row_index_path("/d") == "/d/rows.brix");
  CHECK(index::key_index_path("/d", KeyKind::email, 5) == "/d/key_email_5.brix");
  CHECK(index::key_index_path("/d", KeyKind::integer, 7) == "/d/key_integer_7.brix");
}
