#pragma once

// Benchmark harness: probes records at quartile positions plus an absent
// key, per strategy, asserting correctness before accepting any timing.
// Cells run strictly sequentially; each cell is the median of its
// repetitions after uncounted warmup rounds.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "brix/core.hpp"
#include "brix/planner.hpp"
#include "brix/scan.hpp"

namespace brix::bench {

struct MissingPlants : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A strategy returned wrong matches; timing without correctness is
// meaningless.
struct CorrectnessFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ProbeGroup : std::uint8_t { email, integer, row };

const char* probe_group_name(ProbeGroup group);

struct Probe {
  std::string label;
  ProbeGroup group = ProbeGroup::email;
  plan::Query query;
  std::optional<std::uint64_t> expected_row;  // none for absent probes
};

struct PlantedKey {
  std::uint64_t row = 0;
  std::string email;
  std::string phone;
};

struct BenchPlan {
  DatasetDescriptor dataset;
  std::vector<scan::Strategy> strategies;
  std::vector<Probe> probes;
  std::uint32_t repetitions = 3;
  std::uint32_t warmup = 1;
  std::size_t chunk_rows = 65536;
};

struct MakePlanOptions {
  std::uint32_t email_column = 5;
  std::uint32_t phone_column = 7;
  bool integer_probes = false;  // adds integer-kind probes on the phone column
  bool row_probes = false;      // adds positional probes
  std::uint32_t repetitions = 3;
  std::uint32_t warmup = 1;
  std::size_t chunk_rows = 65536;
};

// Emits one present probe per quartile plus one absent probe per group, in
// the tables' row order (quartiles ascending, invalid last). Throws
// MissingPlants unless the plants cover quartile_rows(row_count).
BenchPlan make_plan(const DatasetDescriptor& dataset,
                    const std::vector<PlantedKey>& plants,
                    std::vector<scan::Strategy> strategies,
                    MakePlanOptions options = {});

struct Cell {
  scan::Strategy strategy;
  std::string probe_label;
  ProbeGroup group;
  double elapsed_s = 0.0;  // median of repetitions
  std::uint64_t matches = 0;
  std::uint64_t bytes_scanned = 0;
};

struct StrategyAverage {
  scan::Strategy strategy;
  double avg_s = 0.0;  // arithmetic mean of this strategy's cells
};

struct Environment {
  std::string os;
  std::string cpu;
  std::string kernels_backend;
  unsigned threads = 0;
  std::string corpus;
  std::uint64_t corpus_bytes = 0;
  std::uint64_t corpus_rows = 0;
  std::uint32_t repetitions = 0;
  std::uint32_t warmup = 0;
};

struct BenchReport {
  Environment environment;
  std::vector<Cell> cells;  // strategy-major, probes in plan order
  std::vector<StrategyAverage> averages;
};

Environment collect_environment(const DatasetDescriptor& dataset);

// Monotonic nanosecond clock; injectable so report rendering can be
// golden-tested with deterministic timings.
using Clock = std::function<std::uint64_t()>;
Clock steady_clock_ns();

struct RunOptions {
  Clock clock;  // defaults to steady_clock_ns()
  std::optional<Environment> environment;  // defaults to collect_environment
};

// Requires every index strategy's index to be present in `indexes`.
// Throws CorrectnessFailure or plan::StrategyUnavailable.
BenchReport run(const BenchPlan& plan, const plan::IndexSet& indexes,
                RunOptions options = {});

enum class ReportFormat : std::uint8_t { json, markdown };

// markdown: one table per probe group plus the overall-average table;
// json: stable keys (strategy, probe_label, elapsed_s, matches,
// bytes_scanned, avg_s). Times printed with 4 decimal places.
std::string render_report(const BenchReport& report, ReportFormat format);

}  // namespace brix::bench
