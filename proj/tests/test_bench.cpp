#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>

#include "brix/bench.hpp"
#include "brix/csv.hpp"
#include "brix/datagen.hpp"
#include "helpers.hpp"

using namespace brix;

namespace {

struct Fixture {
  testutil::TempDir tmp{"bench"};
  datagen::GenSpec spec;
  DatasetDescriptor dataset;
  plan::IndexSet indexes;
  std::vector<bench::PlantedKey> plants;

  explicit Fixture(std::uint64_t rows = 100) {
    spec.rows = rows;
    spec.columns = 10;
    spec.seed = 71;
    spec.email_column = 5;
    spec.phone_column = 7;
    spec.planted = datagen::quartile_plants(rows);
    dataset = datagen::generate_dataset(spec, tmp.path("c.csv"));
    const auto dir = tmp.path("idx");
    std::filesystem::create_directories(dir);
    const auto rows_path = index::row_index_path(dir);
    index::build_row_offset_index(dataset, rows_path);
    const auto email_path = index::key_index_path(dir, KeyKind::email, 5);
    index::build_key_index(dataset, 5, KeyKind::email, email_path);
    const auto int_path = index::key_index_path(dir, KeyKind::integer, 7);
    index::build_key_index(dataset, 7, KeyKind::integer, int_path);
    indexes.row_index = index::load_index(rows_path, dataset);
    indexes.key_indexes.push_back(index::load_index(email_path, dataset));
    indexes.key_indexes.push_back(index::load_index(int_path, dataset));
    for (const auto& p : spec.planted) plants.push_back({p.row_number, p.email, p.phone});
  }

  bench::MakePlanOptions options() const {
    bench::MakePlanOptions o;
    o.email_column = spec.email_column;
    o.phone_column = spec.phone_column;
    o.chunk_rows = 32;
    return o;
  }
};

const std::vector<scan::Strategy> kAllFive = {
    scan::Strategy::index_lookup, scan::Strategy::chunked_scan,
    scan::Strategy::line_scan_all, scan::Strategy::line_scan_first,
    scan::Strategy::field_scan};

bench::Environment fixed_environment() {
  bench::Environment env;
  env.os = "TestOS 1.0 x86_64";
  env.cpu = "Test CPU";
  env.kernels_backend = "scalar";
  env.threads = 2;
  env.corpus = "corpus.csv";
  env.corpus_bytes = 1234;
  env.corpus_rows = 100;
  return env;
}

}  // namespace

TEST_CASE("make_plan emits quartile probes plus one absent probe, in order") {
  Fixture f;
  const auto plan =
      bench::make_plan(f.dataset, f.plants, {scan::Strategy::field_scan}, f.options());
  REQUIRE(plan.probes.size() == 5);
  CHECK(plan.probes[0].label == "Email ID 1");
  CHECK(plan.probes[3].label == "Email ID 4");
  CHECK(plan.probes[4].label == "Invalid Email");
  CHECK(plan.probes[0].expected_row == 25);
  CHECK(plan.probes[1].expected_row == 50);
  CHECK(plan.probes[2].expected_row == 75);
  CHECK(plan.probes[3].expected_row == 100);
  CHECK_FALSE(plan.probes[4].expected_row.has_value());
  const auto& invalid = std::get<plan::ByKey>(plan.probes[4].query.target);
  CHECK(invalid.key.value.find("@absent.invalid") != std::string::npos);
}

TEST_CASE("five strategies over five probes fill a 25-cell grid") {
  Fixture f;
  auto plan = bench::make_plan(f.dataset, f.plants, kAllFive, f.options());
  plan.repetitions = 1;
  plan.warmup = 0;
  const auto report = bench::run(plan, f.indexes);
  CHECK(report.cells.size() == 25);
  CHECK(report.averages.size() == 5);
  for (const auto& cell : report.cells) {
    if (cell.probe_label == "Invalid Email") {
      CHECK(cell.matches == 0);
    } else {
      CHECK(cell.matches == 1);
    }
  }
}

TEST_CASE("integer and row probe groups extend the plan") {
  Fixture f;
  auto options = f.options();
  options.integer_probes = true;
  options.row_probes = true;
  auto plan = bench::make_plan(f.dataset, f.plants,
                               {scan::Strategy::index_lookup,
                                scan::Strategy::field_scan},
                               options);
  CHECK(plan.probes.size() == 15);
  plan.repetitions = 1;
  plan.warmup = 0;
  const auto report = bench::run(plan, f.indexes);
  CHECK(report.cells.size() == 30);
  bool saw_integer = false;
  bool saw_row = false;
  for (const auto& cell : report.cells) {
    saw_integer |= cell.group == bench::ProbeGroup::integer;
    saw_row |= cell.group == bench::ProbeGroup::row;
  }
  CHECK(saw_integer);
  CHECK(saw_row);
}

TEST_CASE("row probes are skipped for strategies that cannot serve them") {
  Fixture f;
  auto options = f.options();
  options.row_probes = true;
  auto plan = bench::make_plan(f.dataset, f.plants,
                               {scan::Strategy::chunked_scan}, options);
  plan.repetitions = 1;
  plan.warmup = 0;
  const auto report = bench::run(plan, f.indexes);
  // Only the 5 email probes ran; positional probes have no chunked analogue.
  CHECK(report.cells.size() == 5);
}

TEST_CASE("make_plan demands plants at every quartile") {
  Fixture f;
  auto missing = f.plants;
  missing.erase(missing.begin() + 2);
  CHECK_THROWS_AS(
      bench::make_plan(f.dataset, missing, {scan::Strategy::field_scan}, f.options()),
      bench::MissingPlants);
}

TEST_CASE("the correctness gate rejects wrong matches before timing") {
  Fixture f;
  auto plan = bench::make_plan(f.dataset, f.plants, {scan::Strategy::field_scan},
                               f.options());
  plan.repetitions = 1;
  plan.warmup = 0;

  SUBCASE("wrong expected row") {
    plan.probes[0].expected_row = *plan.probes[0].expected_row + 1;
    CHECK_THROWS_AS(bench::run(plan, f.indexes), bench::CorrectnessFailure);
  }
  SUBCASE("expected a hit, probed an absent key") {
    plan.probes[0].query.target =
        plan::ByKey{f.spec.email_column, normalize_email(datagen::absent_email())};
    CHECK_THROWS_AS(bench::run(plan, f.indexes), bench::CorrectnessFailure);
  }
  SUBCASE("expected nothing, probed a present key") {
    plan.probes[4].query.target = plan.probes[0].query.target;
    CHECK_THROWS_AS(bench::run(plan, f.indexes), bench::CorrectnessFailure);
  }
}

TEST_CASE("index strategy without a loaded index is refused") {
  Fixture f;
  auto plan = bench::make_plan(f.dataset, f.plants, {scan::Strategy::index_lookup},
                               f.options());
  plan.repetitions = 1;
  plan.warmup = 0;
  plan::IndexSet none;
  CHECK_THROWS_AS(bench::run(plan, none), plan::StrategyUnavailable);
}

TEST_CASE("per-strategy averages are the mean of that strategy's cells") {
  Fixture f;
  auto plan = bench::make_plan(
      f.dataset, f.plants,
      {scan::Strategy::index_lookup, scan::Strategy::field_scan}, f.options());
  plan.repetitions = 3;
  plan.warmup = 0;
  const auto report = bench::run(plan, f.indexes);
  for (const auto& avg : report.averages) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& cell : report.cells) {
      if (cell.strategy == avg.strategy) {
        sum += cell.elapsed_s;
        ++n;
      }
    }
    REQUIRE(n == 5);
    CHECK(std::fabs(avg.avg_s - sum / 5.0) <= 1e-9 * std::max(1.0, avg.avg_s));
  }
}

TEST_CASE("an injected clock makes cell timings deterministic") {
  Fixture f;
  auto plan = bench::make_plan(f.dataset, f.plants, {scan::Strategy::field_scan},
                               f.options());
  plan.repetitions = 3;
  plan.warmup = 1;
  bench::RunOptions options;
  // Each call advances 1 ms, so every (t1 - t0) spans exactly 1 ms.
  std::uint64_t ticks = 0;
  options.clock = [&ticks]() { return ticks += 1000000ull; };
  options.environment = fixed_environment();
  const auto report = bench::run(plan, f.indexes, options);
  REQUIRE(report.cells.size() == 5);
  for (const auto& cell : report.cells) {
    CHECK(cell.elapsed_s == 0.001);
  }
  for (const auto& avg : report.averages) {
    CHECK(avg.avg_s == 0.001);
  }
}

TEST_CASE("rendered reports are byte-stable goldens") {
  bench::BenchReport report;
  report.environment = fixed_environment();
  report.environment.repetitions = 3;
  report.environment.warmup = 1;
  report.cells = {
      {scan::Strategy::index_lookup, "Email ID 1", bench::ProbeGroup::email, 0.0005,
       1, 100},
      {scan::Strategy::index_lookup, "Invalid Email", bench::ProbeGroup::email,
       0.00004, 0, 0},
      {scan::Strategy::field_scan, "Email ID 1", bench::ProbeGroup::email, 44.8576,
       1, 5000},
      {scan::Strategy::field_scan, "Invalid Email", bench::ProbeGroup::email,
       183.67119, 0, 10000},
  };
  report.averages = {
      {scan::Strategy::index_lookup, 0.00027},
      {scan::Strategy::field_scan, 114.264395},
  };

  const std::string markdown = bench::render_report(report, bench::ReportFormat::markdown);
  const std::string want_markdown =
      "# brix benchmark report\n"
      "\n"
      "- os: TestOS 1.0 x86_64\n"
      "- cpu: Test CPU\n"
      "- kernels: scalar\n"
      "- threads: 2\n"
      "- corpus: corpus.csv (100 rows, 1234 bytes)\n"
      "- repetitions: 3 (median), warmup: 1\n"
      "\n"
      "## Lookups by email (seconds)\n"
      "\n"
      "| Probe | index_lookup | field_scan |\n"
      "|---|---|---|\n"
      "| Email ID 1 | 0.0005 | 44.8576 |\n"
      "| Invalid Email | 0.0000 | 183.6712 |\n"
      "\n"
      "## Overall average (seconds)\n"
      "\n"
      "| Strategy | Average Time |\n"
      "|---|---|\n"
      "| index_lookup | 0.0003 |\n"
      "| field_scan | 114.2644 |\n";
  CHECK(markdown == want_markdown);

  const std::string json_text = bench::render_report(report, bench::ReportFormat::json);
  const auto j = nlohmann::json::parse(json_text);
  CHECK(j["environment"]["os"] == "TestOS 1.0 x86_64");
  CHECK(j["cells"].size() == 4);
  CHECK(j["cells"][0]["strategy"] == "index_lookup");
  CHECK(j["cells"][0]["probe_label"] == "Email ID 1");
  CHECK(j["cells"][0]["elapsed_s"] == 0.0005);
  CHECK(j["cells"][2]["bytes_scanned"] == 5000);
  CHECK(j["cells"][2]["matches"] == 1);
  CHECK(j["averages"][1]["strategy"] == "field_scan");
  CHECK(j["averages"][1]["avg_s"] == 114.264395);

  // The same render twice is byte-identical.
  CHECK(bench::render_report(report, bench::ReportFormat::json) == json_text);
}

TEST_CASE("markdown and json agree to printed precision") {
  Fixture f;
  auto plan = bench::make_plan(
      f.dataset, f.plants,
      {scan::Strategy::index_lookup, scan::Strategy::chunked_scan}, f.options());
  plan.repetitions = 1;
  plan.warmup = 0;
  bench::RunOptions options;
  options.environment = fixed_environment();
  const auto report = bench::run(plan, f.indexes, options);
  const auto markdown = bench::render_report(report, bench::ReportFormat::markdown);
  const auto j =
      nlohmann::json::parse(bench::render_report(report, bench::ReportFormat::json));
  for (const auto& cell : j["cells"]) {
    char want[32];
    std::snprintf(want, sizeof(want), "%.4f", cell["elapsed_s"].get<double>());
    CHECK(markdown.find(want) != std::string::npos);
  }
}

TEST_CASE("an empty strategy list renders headers only") {
  Fixture f;
  auto plan = bench::make_plan(f.dataset, f.plants, {}, f.options());
  plan.repetitions = 1;
  const auto report = bench::run(plan, f.indexes);
  CHECK(report.cells.empty());
  CHECK(report.averages.empty());
  const auto markdown = bench::render_report(report, bench::ReportFormat::markdown);
  CHECK(markdown.find("## Overall average") != std::string::npos);
  const auto j =
      nlohmann::json::parse(bench::render_report(report, bench::ReportFormat::json));
  CHECK(j["cells"].empty());
}

TEST_CASE("collect_environment reports this machine") {
  Fixture f;
  const auto env = bench::collect_environment(f.dataset);
  CHECK_FALSE(env.os.empty());
  CHECK_FALSE(env.kernels_backend.empty());
  CHECK(env.threads >= 1);
  CHECK(env.corpus_rows == 100);
}
