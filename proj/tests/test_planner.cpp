#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "brix/csv.hpp"
#include "brix/datagen.hpp"
#include "brix/planner.hpp"
#include "helpers.hpp"

using namespace brix;
using plan::ByKey;
using plan::ByRow;
using plan::Override;
using plan::Query;

namespace {

struct Fixture {
  testutil::TempDir tmp{"planner"};
  datagen::GenSpec spec;
  DatasetDescriptor dataset;
  plan::IndexSet indexes;

  Fixture() {
    spec.rows = 500;
    spec.columns = 12;
    spec.seed = 51;
    spec.email_column = 5;
    spec.phone_column = 7;
    spec.planted = datagen::quartile_plants(spec.rows);
    dataset = datagen::generate_dataset(spec, tmp.path("c.csv"));
    const auto dir = tmp.path("idx");
    std::filesystem::create_directories(dir);
    const auto rows_path = index::row_index_path(dir);
    index::build_row_offset_index(dataset, rows_path);
    const auto email_path = index::key_index_path(dir, KeyKind::email, 5);
    index::build_key_index(dataset, 5, KeyKind::email, email_path);
    indexes.row_index = index::load_index(rows_path, dataset);
    indexes.key_indexes.push_back(index::load_index(email_path, dataset));
  }

  Query by_email(const std::string& email, Override ov = Override::auto_pick) const {
    Query q;
    q.target = ByKey{spec.email_column, normalize_email(email)};
    q.strategy = ov;
    return q;
  }
};

std::set<std::uint64_t> rows_of(const plan::QueryResult& r) {
  std::set<std::uint64_t> rows;
  for (const auto& m : r.matches) rows.insert(m.record.row_number);
  return rows;
}

}  // namespace

TEST_CASE("plan picks the index when one matches, else field_scan") {
  Fixture f;
  CHECK(plan::plan(f.by_email("x@y.z"), f.indexes) == scan::Strategy::index_lookup);

  plan::IndexSet none;
  CHECK(plan::plan(f.by_email("x@y.z"), none) == scan::Strategy::field_scan);

  Query phone_q;
  phone_q.target = ByKey{f.spec.phone_column, normalize_phone("123")};
  // No phone index exists, so auto falls back.
  CHECK(plan::plan(phone_q, f.indexes) == scan::Strategy::field_scan);

  Query row_q;
  row_q.target = ByRow{10};
  CHECK(plan::plan(row_q, f.indexes) == scan::Strategy::index_lookup);
  CHECK(plan::plan(row_q, none) == scan::Strategy::field_scan);
}

TEST_CASE("plan honors overrides or refuses loudly") {
  Fixture f;
  CHECK(plan::plan(f.by_email("x@y.z", Override::chunked_scan), f.indexes) ==
        scan::Strategy::chunked_scan);
  CHECK(plan::plan(f.by_email("x@y.z", Override::line_scan), f.indexes) ==
        scan::Strategy::line_scan_all);
  CHECK(plan::plan(f.by_email("x@y.z", Override::field_scan), f.indexes) ==
        scan::Strategy::field_scan);

  plan::IndexSet none;
  CHECK_THROWS_AS(plan::plan(f.by_email("x@y.z", Override::index), none),
                  plan::StrategyUnavailable);

  Query phone_q;
  phone_q.target = ByKey{f.spec.phone_column, normalize_phone("123")};
  phone_q.strategy = Override::index;
  // An email index exists but the kinds differ.
  CHECK_THROWS_AS(plan::plan(phone_q, f.indexes), plan::StrategyUnavailable);

  Query row_q;
  row_q.target = ByRow{10};
  row_q.strategy = Override::chunked_scan;
  CHECK_THROWS_AS(plan::plan(row_q, f.indexes), plan::StrategyUnavailable);
  row_q.strategy = Override::line_scan;
  CHECK_THROWS_AS(plan::plan(row_q, f.indexes), plan::StrategyUnavailable);
}

TEST_CASE("by_row equals the sequential parse, with and without the index") {
  Fixture f;
  csv::ChunkReader reader(f.dataset, 1 << 20);
  const auto chunk = reader.next();
  REQUIRE(chunk);

  plan::IndexSet none;
  for (std::uint64_t row : {1ull, 137ull, 500ull}) {
    Query q;
    q.target = ByRow{row};
    const auto via_index = plan::execute(q, f.dataset, f.indexes);
    CHECK(via_index.strategy == scan::Strategy::index_lookup);
    REQUIRE(via_index.matches.size() == 1);
    CHECK(via_index.matches[0].record.fields == chunk->records[row - 1].fields);
    CHECK(via_index.matches[0].record.row_number == row);

    const auto via_walk = plan::execute(q, f.dataset, none);
    CHECK(via_walk.strategy == scan::Strategy::field_scan);
    REQUIRE(via_walk.matches.size() == 1);
    CHECK(via_walk.matches[0].record.fields == chunk->records[row - 1].fields);
    CHECK(via_walk.bytes_scanned <= f.dataset.size_bytes);
  }

  // Walk cost grows with the position.
  Query early;
  early.target = ByRow{10};
  Query late;
  late.target = ByRow{490};
  CHECK(plan::execute(early, f.dataset, none).bytes_scanned <
        plan::execute(late, f.dataset, none).bytes_scanned);
}

TEST_CASE("absent targets return empty results, not errors") {
  Fixture f;
  Query beyond;
  beyond.target = ByRow{f.spec.rows + 1};
  CHECK(plan::execute(beyond, f.dataset, f.indexes).matches.empty());
  plan::IndexSet none;
  CHECK(plan::execute(beyond, f.dataset, none).matches.empty());

  const auto absent = plan::execute(f.by_email(datagen::absent_email()), f.dataset,
                                    f.indexes);
  CHECK(absent.matches.empty());
  CHECK(absent.strategy == scan::Strategy::index_lookup);
}

TEST_CASE("by_row rejects row 0") {
  Fixture f;
  Query q;
  q.target = ByRow{0};
  CHECK_THROWS_AS(plan::execute(q, f.dataset, f.indexes), std::invalid_argument);
}

TEST_CASE("strategy transparency: every executable strategy, same match set") {
  Fixture f;
  std::mt19937_64 rng(6);
  std::vector<std::string> emails;
  for (const auto& p : f.spec.planted) emails.push_back(p.email);
  for (int i = 0; i < 20; ++i) {
    emails.push_back(datagen::generated_email(f.spec.seed, 1 + rng() % f.spec.rows));
    emails.push_back(datagen::absent_email(static_cast<unsigned>(i)));
  }

  for (const auto& email : emails) {
    const auto via_index =
        rows_of(plan::execute(f.by_email(email, Override::index), f.dataset, f.indexes));
    const auto via_field = rows_of(
        plan::execute(f.by_email(email, Override::field_scan), f.dataset, f.indexes));
    const auto via_chunked = rows_of(plan::execute(
        f.by_email(email, Override::chunked_scan), f.dataset, f.indexes));
    const auto via_line = rows_of(
        plan::execute(f.by_email(email, Override::line_scan), f.dataset, f.indexes));
    CHECK(via_index == via_field);
    CHECK(via_index == via_chunked);
    CHECK(via_index == via_line);
  }
}

TEST_CASE("transparency holds for duplicate keys too") {
  testutil::TempDir tmp("planner_dupes");
  datagen::GenSpec spec;
  spec.rows = 100;
  spec.columns = 10;
  spec.seed = 52;
  spec.email_column = 5;
  spec.phone_column = 7;
  spec.planted = {{10, "dup@planted.example", "1"}, {90, "dup@planted.example", "2"}};
  const auto dataset = datagen::generate_dataset(spec, tmp.path("c.csv"));
  const auto dir = tmp.path("idx");
  std::filesystem::create_directories(dir);
  const auto email_path = index::key_index_path(dir, KeyKind::email, 5);
  index::build_key_index(dataset, 5, KeyKind::email, email_path);
  plan::IndexSet indexes;
  indexes.key_indexes.push_back(index::load_index(email_path, dataset));

  Query q;
  q.target = ByKey{5, normalize_email("dup@planted.example")};
  const std::set<std::uint64_t> want_offsets = [&] {
    std::set<std::uint64_t> s;
    for (const auto& m : plan::execute(q, dataset, indexes).matches) {
      s.insert(m.record.byte_offset);
    }
    return s;
  }();
  CHECK(want_offsets.size() == 2);
  for (auto ov : {Override::field_scan, Override::chunked_scan, Override::line_scan}) {
    q.strategy = ov;
    std::set<std::uint64_t> got;
    for (const auto& m : plan::execute(q, dataset, indexes).matches) {
      got.insert(m.record.byte_offset);
    }
    CHECK(got == want_offsets);
  }
}

TEST_CASE("index path resolves row numbers through the row-offset index") {
  Fixture f;
  const auto r = plan::execute(f.by_email(f.spec.planted[1].email), f.dataset,
                               f.indexes);
  REQUIRE(r.matches.size() == 1);
  CHECK(r.matches[0].record.row_number == f.spec.planted[1].row_number);
  CHECK(r.strategy == scan::Strategy::index_lookup);
  CHECK(r.bytes_scanned > 0);
  CHECK(r.bytes_scanned < 4096);  // a record's worth, not a scan's
}

TEST_CASE("empty keys match nothing under any strategy") {
  Fixture f;
  for (auto ov : {Override::auto_pick, Override::field_scan, Override::chunked_scan,
                  Override::line_scan}) {
    CHECK(plan::execute(f.by_email("", ov), f.dataset, f.indexes).matches.empty());
  }
}

TEST_CASE("planning is deterministic") {
  Fixture f;
  const auto q = f.by_email("same@query.example");
  const auto first = plan::plan(q, f.indexes);
  for (int i = 0; i < 10; ++i) CHECK(plan::plan(q, f.indexes) == first);
}
