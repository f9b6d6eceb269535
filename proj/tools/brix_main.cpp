// brix: generate / index / query / bench / estimate / inspect for large
// CSV breach corpora. One command per process; deterministic exit codes:
// 0 success (a not-found key is success with empty output), 1 operational
// error, 2 usage error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "brix/bench.hpp"
#include "brix/core.hpp"
#include "brix/csv.hpp"
#include "brix/datagen.hpp"
#include "brix/estimator.hpp"
#include "brix/index.hpp"
#include "brix/planner.hpp"
#include "brix/scan.hpp"

namespace {

using namespace brix;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::filesystem::path resolve_index_dir(const std::string& flag,
                                        const std::filesystem::path& corpus) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("BRIX_INDEX_DIR"); env && *env) return env;
  return index::default_index_dir(corpus);
}

DatasetDescriptor light_descriptor(const std::filesystem::path& corpus,
                                   bool has_header) {
  // No counting pass; enough for fingerprint-based work.
  DatasetDescriptor d;
  d.path = corpus;
  d.has_header = has_header;
  d.fingerprint = fingerprint_dataset(corpus);
  d.size_bytes = d.fingerprint.size_bytes;
  return d;
}

struct LoadedIndexes {
  plan::IndexSet set;
  std::vector<std::string> warnings;
};

LoadedIndexes load_indexes(const DatasetDescriptor& dataset,
                           const std::filesystem::path& index_dir) {
  LoadedIndexes out;
  namespace fs = std::filesystem;
  if (!fs::is_directory(index_dir)) return out;
  const auto row_path = index::row_index_path(index_dir);
  if (fs::exists(row_path)) {
    try {
      out.set.row_index = index::load_index(row_path, dataset);
    } catch (const index::IndexError& e) {
      out.warnings.push_back("skipping " + row_path.string() + ": " +
                             index::index_error_name(e.code) + " (" + e.what() + ")");
    }
  }
  for (const auto& entry : fs::directory_iterator(index_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.rfind("key_", 0) != 0 || entry.path().extension() != ".brix") continue;
    try {
      out.set.key_indexes.push_back(index::load_index(entry.path(), dataset));
    } catch (const index::IndexError& e) {
      out.warnings.push_back("skipping " + entry.path().string() + ": " +
                             index::index_error_name(e.code) + " (" + e.what() + ")");
    }
  }
  return out;
}

void print_warnings(const LoadedIndexes& loaded) {
  for (const auto& w : loaded.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::uint64_t rows = 0;
  std::uint32_t columns = 59;
  std::uint64_t seed = 0;
  std::uint32_t email_col = 5;
  std::uint32_t phone_col = 7;
  std::string out;
  std::vector<std::string> plants;
  bool no_plants = false;
};

int run_generate(const GenerateArgs& args) {
  datagen::GenSpec spec;
  spec.rows = args.rows;
  spec.columns = args.columns;
  spec.seed = args.seed;
  spec.email_column = args.email_col;
  spec.phone_column = args.phone_col;

  if (!args.plants.empty()) {
    for (const auto& raw : args.plants) {
      const auto a = raw.find(':');
      const auto b = raw.find(':', a == std::string::npos ? a : a + 1);
      if (a == std::string::npos || b == std::string::npos) {
        throw UsageError("--plant expects ROW:EMAIL:PHONE, got '" + raw + "'");
      }
      datagen::Plant plant;
      plant.row_number = std::strtoull(raw.substr(0, a).c_str(), nullptr, 10);
      plant.email = raw.substr(a + 1, b - a - 1);
      plant.phone = raw.substr(b + 1);
      spec.planted.push_back(std::move(plant));
    }
    std::sort(spec.planted.begin(), spec.planted.end(),
              [](const auto& x, const auto& y) { return x.row_number < y.row_number; });
  } else if (!args.no_plants && args.rows >= 4) {
    spec.planted = datagen::quartile_plants(args.rows);
  }

  const std::filesystem::path out_path = args.out;
  const auto descriptor = datagen::generate_dataset(spec, out_path);
  const auto manifest = datagen::default_manifest_path(out_path);
  datagen::write_manifest(spec, out_path, manifest);

  std::cout << "wrote " << out_path.string() << " (" << descriptor.row_count
            << " rows x " << descriptor.column_count << " columns, "
            << descriptor.size_bytes << " bytes)\n";
  std::cout << "wrote " << manifest.string() << " (" << spec.planted.size()
            << " planted keys)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// index

struct IndexArgs {
  std::string corpus;
  std::vector<std::string> keys;
  std::string index_dir;
  bool no_row_offset = false;
  bool rebuild = false;
  bool no_header = false;
  std::uint64_t budget_mb = 512;
};

std::pair<KeyKind, std::uint32_t> parse_key_spec(const std::string& raw) {
  const auto colon = raw.find(':');
  if (colon == std::string::npos) {
    throw UsageError("--key expects KIND:COLUMN, got '" + raw + "'");
  }
  const auto kind = key_kind_from_name(raw.substr(0, colon));
  if (!kind) {
    throw UsageError("unknown key kind '" + raw.substr(0, colon) +
                     "' (email|phone|integer|verbatim)");
  }
  return {*kind, static_cast<std::uint32_t>(
                     std::strtoul(raw.substr(colon + 1).c_str(), nullptr, 10))};
}

// Returns true when an up-to-date index already exists at path.
bool index_is_current(const std::filesystem::path& path,
                      const DatasetDescriptor& dataset, bool rebuild) {
  if (!std::filesystem::exists(path)) return false;
  try {
    index::load_index(path, dataset);
    return true;
  } catch (const index::IndexError& e) {
    if (rebuild) return false;
    throw index::IndexError(e.code, path.string() + ": " + e.what() +
                                        " (pass --rebuild to replace it)");
  }
}

int run_index(const IndexArgs& args, std::ostream& progress = std::cout) {
  const std::filesystem::path corpus = args.corpus;
  const auto dataset =
      csv::describe_dataset(corpus, CsvDialect{}, !args.no_header);
  const auto index_dir = resolve_index_dir(args.index_dir, corpus);
  std::filesystem::create_directories(index_dir);

  index::KeyIndexBuildOptions build_options;
  build_options.memory_budget_bytes = args.budget_mb << 20;

  if (!args.no_row_offset) {
    const auto path = index::row_index_path(index_dir);
    if (index_is_current(path, dataset, args.rebuild)) {
      progress << path.string() << ": up to date\n";
    } else {
      const auto result = index::build_row_offset_index(dataset, path);
      progress << path.string() << ": " << result.entries << " entries";
      if (result.malformed_skipped) {
        progress << ", " << result.malformed_skipped << " malformed rows skipped";
      }
      progress << "\n";
    }
  }

  for (const auto& raw : args.keys) {
    const auto [kind, column] = parse_key_spec(raw);
    if (column >= dataset.column_count) {
      throw UsageError("column " + std::to_string(column) + " out of range (corpus has " +
                       std::to_string(dataset.column_count) + " columns)");
    }
    const auto path = index::key_index_path(index_dir, kind, column);
    if (index_is_current(path, dataset, args.rebuild)) {
      progress << path.string() << ": up to date\n";
      continue;
    }
    const auto result = index::build_key_index(dataset, column, kind, path, build_options);
    progress << path.string() << ": " << result.entries << " entries";
    if (result.empty_keys_skipped) {
      progress << ", " << result.empty_keys_skipped << " empty keys skipped";
    }
    if (result.malformed_skipped) {
      progress << ", " << result.malformed_skipped << " malformed rows skipped";
    }
    progress << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// query

struct QueryArgs {
  std::string corpus;
  std::uint64_t row = 0;
  std::string email;
  std::string phone;
  std::string integer;
  std::string pattern;
  std::int64_t column = -1;
  std::string strategy = "auto";
  std::string index_dir;
  std::size_t chunk_rows = 65536;
  unsigned threads = 0;
  bool first_only = false;
  bool no_header = false;
  bool verbose = false;
};

int run_query(const QueryArgs& args, CLI::App* sub) {
  const std::filesystem::path corpus = args.corpus;
  const auto dataset = csv::describe_dataset(corpus, CsvDialect{}, !args.no_header);

  if (sub->count("--pattern")) {
    if (args.strategy != "auto" && args.strategy != "line-scan" &&
        args.strategy != "line_scan") {
      throw UsageError("--pattern always uses line_scan");
    }
    scan::Matcher matcher(args.pattern);
    scan::ScanStats stats;
    const auto mode = args.first_only ? scan::ScanMode::first : scan::ScanMode::all;
    const auto matches = scan::line_scan(dataset, matcher, mode, &stats);
    for (const auto& m : matches) {
      std::cout << csv::write_row(m.record.fields, dataset.dialect) << "\n";
    }
    if (args.verbose) {
      std::fprintf(stderr, "strategy=%s matches=%zu elapsed_s=%.4f bytes=%llu\n",
                   args.first_only ? "line_scan_first" : "line_scan_all",
                   matches.size(), stats.elapsed_s,
                   static_cast<unsigned long long>(stats.bytes_scanned));
    }
    return 0;
  }

  const auto loaded_dir = resolve_index_dir(args.index_dir, corpus);
  const auto load_t0 = std::chrono::steady_clock::now();
  auto loaded = load_indexes(dataset, loaded_dir);
  const double load_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - load_t0)
          .count();
  print_warnings(loaded);
  if (args.verbose) {
    // Query timings below cover strategy execution only.
    std::fprintf(stderr, "index_load_s=%.4f\n", load_s);
  }

  plan::Query query;
  if (sub->count("--row")) {
    if (args.row < 1) throw UsageError("--row expects a 1-based row number");
    query.target = plan::ByRow{args.row};
  } else {
    KeyKind kind;
    std::string raw;
    if (sub->count("--email")) {
      kind = KeyKind::email;
      raw = args.email;
    } else if (sub->count("--phone")) {
      kind = KeyKind::phone;
      raw = args.phone;
    } else if (sub->count("--integer")) {
      kind = KeyKind::integer;
      raw = args.integer;
    } else {
      throw UsageError("one of --row/--email/--phone/--integer/--pattern is required");
    }
    auto key = make_key(kind, raw);
    if (!key) {
      throw UsageError("'" + raw + "' is not a valid " +
                       std::string(key_kind_name(kind)) + " key");
    }
    std::uint32_t column;
    if (args.column >= 0) {
      column = static_cast<std::uint32_t>(args.column);
    } else {
      // Infer the column from a loaded key index of the same kind.
      const index::IndexHandle* inferred = nullptr;
      for (const auto& h : loaded.set.key_indexes) {
        if (h.header().key_kind == static_cast<std::uint8_t>(kind)) {
          inferred = &h;
          break;
        }
      }
      if (!inferred) {
        throw UsageError(std::string("no --column given and no ") +
                         key_kind_name(kind) + " index to infer it from");
      }
      column = inferred->header().column;
    }
    if (column >= dataset.column_count) {
      throw UsageError("column " + std::to_string(column) + " out of range");
    }
    query.target = plan::ByKey{column, *key};
  }

  if (args.strategy == "auto") {
    query.strategy = plan::Override::auto_pick;
  } else if (auto s = scan::strategy_from_name(args.strategy)) {
    switch (*s) {
      case scan::Strategy::index_lookup:
        query.strategy = plan::Override::index;
        break;
      case scan::Strategy::field_scan:
        query.strategy = plan::Override::field_scan;
        break;
      case scan::Strategy::chunked_scan:
        query.strategy = plan::Override::chunked_scan;
        break;
      case scan::Strategy::line_scan_all:
      case scan::Strategy::line_scan_first:
        query.strategy = plan::Override::line_scan;
        break;
    }
  } else {
    throw UsageError("unknown strategy '" + args.strategy + "'");
  }

  const auto result =
      plan::execute(query, dataset, loaded.set, {args.chunk_rows, args.threads});
  for (const auto& m : result.matches) {
    std::cout << csv::write_row(m.record.fields, dataset.dialect) << "\n";
  }
  if (args.verbose) {
    std::fprintf(stderr, "strategy=%s matches=%zu elapsed_s=%.4f bytes=%llu\n",
                 scan::strategy_name(result.strategy), result.matches.size(),
                 result.elapsed_s,
                 static_cast<unsigned long long>(result.bytes_scanned));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string corpus;
  std::string manifest;
  std::string strategies = "index_lookup,chunked_scan,line_scan_all,field_scan";
  std::uint32_t reps = 3;
  std::uint32_t warmup = 1;
  std::size_t chunk_rows = 65536;
  bool integer_probes = false;
  bool row_probes = false;
  bool json = false;
  bool no_build = false;
  bool rebuild = false;
  bool cold_cache = false;
  std::string out;
  std::string index_dir;
};

int run_bench(const BenchArgs& args) {
  const std::filesystem::path corpus = args.corpus;
  const auto manifest_path = args.manifest.empty()
                                 ? datagen::default_manifest_path(corpus)
                                 : std::filesystem::path(args.manifest);
  const auto spec = datagen::read_manifest(manifest_path);
  const auto dataset = csv::describe_dataset(corpus, CsvDialect{}, true);
  if (dataset.row_count != spec.rows) {
    std::cerr << "warning: manifest says " << spec.rows << " rows, corpus has "
              << dataset.row_count << "\n";
  }

  std::vector<scan::Strategy> strategies;
  {
    std::string token;
    std::stringstream ss(args.strategies);
    while (std::getline(ss, token, ',')) {
      auto s = scan::strategy_from_name(std::string(trim_ascii(token)));
      if (!s) throw UsageError("unknown strategy '" + token + "'");
      strategies.push_back(*s);
    }
    if (strategies.empty()) throw UsageError("--strategies is empty");
  }

  const bool wants_index =
      std::find(strategies.begin(), strategies.end(),
                scan::Strategy::index_lookup) != strategies.end();

  const auto index_dir = resolve_index_dir(args.index_dir, corpus);
  if (wants_index && !args.no_build) {
    IndexArgs idx;
    idx.corpus = args.corpus;
    idx.index_dir = index_dir.string();
    idx.rebuild = args.rebuild;
    idx.keys.push_back("email:" + std::to_string(spec.email_column));
    if (args.integer_probes) {
      idx.keys.push_back("integer:" + std::to_string(spec.phone_column));
    }
    run_index(idx, std::cerr);  // keep stdout clean for the report
  }

  auto loaded = load_indexes(dataset, index_dir);
  print_warnings(loaded);

  std::vector<bench::PlantedKey> plants;
  for (const auto& p : spec.planted) {
    plants.push_back({p.row_number, p.email, p.phone});
  }

  bench::MakePlanOptions options;
  options.email_column = spec.email_column;
  options.phone_column = spec.phone_column;
  options.integer_probes = args.integer_probes;
  options.row_probes = args.row_probes;
  options.repetitions = args.reps;
  options.warmup = args.warmup;
  options.chunk_rows = args.chunk_rows;

  auto plan = bench::make_plan(dataset, plants, strategies, options);

  if (args.cold_cache) {
    // Best effort; not part of any acceptance path.
    File(dataset.path).evict_cache();
  }

  const auto report = bench::run(plan, loaded.set);
  const auto text = bench::render_report(
      report, args.json ? bench::ReportFormat::json : bench::ReportFormat::markdown);
  if (args.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(args.out, std::ios::trunc);
    if (!out) throw IoError("cannot create " + args.out);
    out << text;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
  std::string corpus;
  std::uint64_t sample_bytes = 0;
  double sample_percent = 10.0;
  double target_gb = 0.0;
  std::uint64_t target_bytes = 0;
  std::size_t chunk_rows = 65536;
  bool no_header = false;
};

int run_estimate(const EstimateArgs& args, CLI::App* sub) {
  const auto dataset = light_descriptor(args.corpus, !args.no_header);
  std::uint64_t sample = args.sample_bytes;
  if (sample == 0) {
    sample = static_cast<std::uint64_t>(
        static_cast<double>(dataset.size_bytes) * args.sample_percent / 100.0);
  }
  sample = std::min(sample, dataset.size_bytes);

  const auto profile = est::profile_sample(dataset, sample, {args.chunk_rows});

  double target = static_cast<double>(dataset.size_bytes);
  if (sub->count("--target-bytes")) {
    target = static_cast<double>(args.target_bytes);
  } else if (sub->count("--target-gb")) {
    target = args.target_gb * est::kGiB;
  }

  const auto estimate = est::estimate_all(profile, target);
  std::printf("sample: %llu bytes (%.2f MB), %.4f s, peak buffer %.2f MB\n",
              static_cast<unsigned long long>(profile.sample_size_bytes),
              static_cast<double>(profile.sample_size_bytes) / est::kMiB,
              profile.sample_time_s,
              static_cast<double>(profile.sample_mem_bytes) / est::kMiB);
  std::printf("target: %.2f MB (%.2f GB)\n", target / est::kMiB, target / est::kGiB);
  std::printf("estimated memory: %.2f MB (%.2f GB)\n", estimate.est_mem_bytes / est::kMiB,
              estimate.est_mem_bytes / est::kGiB);
  std::printf("estimated time: %.3f s\n", estimate.est_time_s);
  std::printf(
      "note: linear lower-bound estimates; memory use and processing time can "
      "grow faster than the sample suggests on larger datasets\n");
  return 0;
}

// ---------------------------------------------------------------------------
// inspect

struct InspectArgs {
  std::vector<std::string> files;
  std::string against;
};

int run_inspect(const InspectArgs& args) {
  int rc = 0;
  for (const auto& file : args.files) {
    try {
      const auto header = index::read_index_header(file);
      std::cout << file << ":\n";
      std::cout << "  kind: "
                << (header.kind == index::IndexKind::row_offset ? "row_offset" : "key")
                << "\n";
      std::cout << "  version: " << header.version << "\n";
      if (header.kind == index::IndexKind::key) {
        std::cout << "  key_kind: "
                  << key_kind_name(static_cast<KeyKind>(header.key_kind)) << "\n";
        std::cout << "  column: " << header.column << "\n";
      }
      std::cout << "  entries: " << header.entry_count << "\n";
      std::cout << "  source_size: " << header.fingerprint.size_bytes << "\n";
      std::cout << "  source_mtime: " << header.fingerprint.modified_time << "\n";
      char digest[65] = {};
      for (int i = 0; i < 32; ++i) {
        std::snprintf(digest + 2 * i, 3, "%02x", header.fingerprint.head_digest[i]);
      }
      std::cout << "  source_digest: " << digest << "\n";
      if (!args.against.empty()) {
        const auto fresh = fingerprint_dataset(args.against);
        std::cout << "  freshness: "
                  << (fresh == header.fingerprint ? "FRESH" : "STALE") << "\n";
      }
    } catch (const index::IndexError& e) {
      std::cerr << "ERROR " << index::index_error_name(e.code) << ": " << e.what()
                << "\n";
      rc = 1;
    }
  }
  return rc;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{"byte-offset and key indexing, scanning and benchmarks for "
               "large CSV corpora"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* sub_gen = app.add_subcommand("generate", "write a synthetic corpus");
  sub_gen->add_option("--rows", gen.rows, "data rows to generate")->required();
  sub_gen->add_option("--columns", gen.columns, "columns per row (default 59)");
  sub_gen->add_option("--seed", gen.seed, "PRNG seed");
  sub_gen->add_option("--email-col", gen.email_col, "email column index");
  sub_gen->add_option("--phone-col", gen.phone_col, "phone column index");
  sub_gen->add_option("--out", gen.out, "output CSV path")->required();
  sub_gen->add_option("--plant", gen.plants, "plant ROW:EMAIL:PHONE (repeatable)");
  sub_gen->add_flag("--no-plants", gen.no_plants, "skip default quartile plants");

  IndexArgs idx;
  auto* sub_idx = app.add_subcommand("index", "build persistent indexes");
  sub_idx->add_option("corpus", idx.corpus, "CSV corpus")->required();
  sub_idx->add_option("--key", idx.keys, "key index KIND:COLUMN (repeatable)");
  sub_idx->add_option("--index-dir", idx.index_dir, "index directory");
  sub_idx->add_flag("--no-row-offset", idx.no_row_offset, "skip the row-offset index");
  sub_idx->add_flag("--rebuild", idx.rebuild, "replace stale/invalid indexes");
  sub_idx->add_flag("--no-header", idx.no_header, "corpus has no header line");
  sub_idx->add_option("--budget-mb", idx.budget_mb, "in-memory sort budget (MiB)");

  QueryArgs q;
  auto* sub_q = app.add_subcommand("query", "look up records");
  sub_q->add_option("corpus", q.corpus, "CSV corpus")->required();
  auto* opt_row = sub_q->add_option("--row", q.row, "1-based row number");
  auto* opt_email = sub_q->add_option("--email", q.email, "email key");
  auto* opt_phone = sub_q->add_option("--phone", q.phone, "phone key");
  auto* opt_int = sub_q->add_option("--integer", q.integer, "integer key");
  auto* opt_pat = sub_q->add_option("--pattern", q.pattern, "raw substring (grep mode)");
  opt_row->excludes(opt_email, opt_phone, opt_int, opt_pat);
  opt_email->excludes(opt_phone, opt_int, opt_pat);
  opt_phone->excludes(opt_int, opt_pat);
  opt_int->excludes(opt_pat);
  sub_q->add_option("--column", q.column, "key column index");
  sub_q->add_option("--strategy", q.strategy,
                    "auto|index|field-scan|chunked-scan|line-scan");
  sub_q->add_option("--index-dir", q.index_dir, "index directory");
  sub_q->add_option("--chunk-rows", q.chunk_rows, "chunked scan batch rows");
  sub_q->add_option("--threads", q.threads, "chunked scan workers (0 = auto)");
  sub_q->add_flag("--first", q.first_only, "stop at the first match (pattern mode)");
  sub_q->add_flag("--no-header", q.no_header, "corpus has no header line");
  sub_q->add_flag("-v,--verbose", q.verbose, "timing summary on stderr");

  BenchArgs b;
  auto* sub_b = app.add_subcommand("bench", "run the benchmark suite");
  sub_b->add_option("corpus", b.corpus, "CSV corpus")->required();
  sub_b->add_option("--manifest", b.manifest, "plant manifest (default sidecar)");
  sub_b->add_option("--strategies", b.strategies, "comma-separated strategy list");
  sub_b->add_option("--reps", b.reps, "timed repetitions per cell");
  sub_b->add_option("--warmup", b.warmup, "uncounted warmup rounds per cell");
  sub_b->add_option("--chunk-rows", b.chunk_rows, "chunked scan batch rows");
  sub_b->add_flag("--integer-probes", b.integer_probes, "add integer-typed probes");
  sub_b->add_flag("--row-probes", b.row_probes, "add positional probes");
  sub_b->add_flag("--json", b.json, "emit the JSON report");
  sub_b->add_flag("--no-build", b.no_build, "fail instead of building missing indexes");
  sub_b->add_flag("--rebuild", b.rebuild, "replace stale indexes before running");
  sub_b->add_flag("--cold", b.cold_cache, "drop the corpus from the page cache first");
  sub_b->add_option("--out", b.out, "write the report to a file");
  sub_b->add_option("--index-dir", b.index_dir, "index directory");

  EstimateArgs e;
  auto* sub_e = app.add_subcommand("estimate", "extrapolate full-corpus cost");
  sub_e->add_option("corpus", e.corpus, "CSV corpus")->required();
  sub_e->add_option("--sample-bytes", e.sample_bytes, "sample prefix size");
  sub_e->add_option("--sample-percent", e.sample_percent,
                    "sample size as a percentage (default 10)");
  sub_e->add_option("--target-bytes", e.target_bytes, "target size in bytes");
  sub_e->add_option("--target-gb", e.target_gb, "target size in GB (1 GB = 1024 MB)");
  sub_e->add_option("--chunk-rows", e.chunk_rows, "chunked reader batch rows");
  sub_e->add_flag("--no-header", e.no_header, "corpus has no header line");

  InspectArgs ins;
  auto* sub_ins = app.add_subcommand("inspect", "dump index file headers");
  sub_ins->add_option("files", ins.files, "index files")->required();
  sub_ins->add_option("--against", ins.against, "check freshness against a corpus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return 2;
  }

  try {
    if (sub_gen->parsed()) return run_generate(gen);
    if (sub_idx->parsed()) return run_index(idx);
    if (sub_q->parsed()) return run_query(q, sub_q);
    if (sub_b->parsed()) return run_bench(b);
    if (sub_e->parsed()) return run_estimate(e, sub_e);
    if (sub_ins->parsed()) return run_inspect(ins);
  } catch (const UsageError& ex) {
    std::cerr << "ERROR USAGE: " << ex.what() << "\n";
    return 2;
  } catch (const index::IndexError& ex) {
    std::cerr << "ERROR " << index::index_error_name(ex.code) << ": " << ex.what()
              << "\n";
    return 1;
  } catch (const plan::StrategyUnavailable& ex) {
    std::cerr << "ERROR STRATEGY_UNAVAILABLE: " << ex.what() << "\n";
    return 1;
  } catch (const bench::MissingPlants& ex) {
    std::cerr << "ERROR MISSING_PLANTS: " << ex.what() << "\n";
    return 1;
  } catch (const bench::CorrectnessFailure& ex) {
    std::cerr << "ERROR CORRECTNESS: " << ex.what() << "\n";
    return 1;
  } catch (const datagen::SpecError& ex) {
    std::cerr << "ERROR SPEC: " << ex.what() << "\n";
    return 1;
  } catch (const est::ZeroSample& ex) {
    std::cerr << "ERROR ZERO_SAMPLE: " << ex.what() << "\n";
    return 1;
  } catch (const csv::MalformedRow& ex) {
    std::cerr << "ERROR MALFORMED_ROW: " << ex.what() << "\n";
    return 1;
  } catch (const IoError& ex) {
    std::cerr << "ERROR IO: " << ex.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "ERROR USAGE: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "ERROR INTERNAL: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
