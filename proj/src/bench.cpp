#include "brix/bench.hpp"

#include <sys/utsname.h>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include "brix/datagen.hpp"
#include "brix/kernels.hpp"

namespace brix::bench {

const char* probe_group_name(ProbeGroup group) {
  switch (group) {
    case ProbeGroup::email:
      return "email";
    case ProbeGroup::integer:
      return "integer";
    case ProbeGroup::row:
      return "row";
  }
  return "unknown";
}

Clock steady_clock_ns() {
  return [] {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
  };
}

Environment collect_environment(const DatasetDescriptor& dataset) {
  Environment env;
  struct ::utsname u{};
  if (::uname(&u) == 0) {
    env.os = std::string(u.sysname) + " " + u.release + " " + u.machine;
  } else {
    env.os = "unknown";
  }
  env.cpu = "unknown";
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpuinfo, line)) {
    if (line.rfind("model name", 0) == 0) {
      auto colon = line.find(':');
      if (colon != std::string::npos) {
        env.cpu = std::string(trim_ascii(line.substr(colon + 1)));
      }
      break;
    }
  }
  env.kernels_backend = std::string(kernels::backend());
  env.threads = std::max(1u, std::thread::hardware_concurrency());
  env.corpus = dataset.path.string();
  env.corpus_bytes = dataset.size_bytes;
  env.corpus_rows = dataset.row_count;
  return env;
}

// ---------------------------------------------------------------------------
// Plan construction

BenchPlan make_plan(const DatasetDescriptor& dataset,
                    const std::vector<PlantedKey>& plants,
                    std::vector<scan::Strategy> strategies, MakePlanOptions options) {
  if (dataset.row_count < 4) {
    throw MissingPlants("benchmarks need at least 4 rows");
  }
  const auto quartiles = datagen::quartile_rows(dataset.row_count);

  std::vector<const PlantedKey*> quartile_plants;
  for (std::uint64_t q : quartiles) {
    const PlantedKey* found = nullptr;
    for (const auto& p : plants) {
      if (p.row == q) {
        found = &p;
        break;
      }
    }
    if (!found) {
      throw MissingPlants("no planted key at quartile row " + std::to_string(q));
    }
    quartile_plants.push_back(found);
  }

  BenchPlan plan;
  plan.dataset = dataset;
  plan.strategies = std::move(strategies);
  plan.repetitions = options.repetitions;
  plan.warmup = options.warmup;
  plan.chunk_rows = options.chunk_rows;

  for (std::size_t i = 0; i < quartile_plants.size(); ++i) {
    Probe probe;
    probe.label = "Email ID " + std::to_string(i + 1);
    probe.group = ProbeGroup::email;
    probe.query.target = plan::ByKey{options.email_column,
                                     normalize_email(quartile_plants[i]->email)};
    probe.expected_row = quartiles[i];
    plan.probes.push_back(std::move(probe));
  }
  {
    Probe probe;
    probe.label = "Invalid Email";
    probe.group = ProbeGroup::email;
    probe.query.target =
        plan::ByKey{options.email_column, normalize_email(datagen::absent_email())};
    plan.probes.push_back(std::move(probe));
  }

  if (options.integer_probes) {
    for (std::size_t i = 0; i < quartile_plants.size(); ++i) {
      auto key = normalize_integer(quartile_plants[i]->phone);
      if (!key) {
        throw MissingPlants("planted phone at row " + std::to_string(quartiles[i]) +
                            " is not integer-typed");
      }
      Probe probe;
      probe.label = "Integer ID " + std::to_string(i + 1);
      probe.group = ProbeGroup::integer;
      probe.query.target = plan::ByKey{options.phone_column, *key};
      probe.expected_row = quartiles[i];
      plan.probes.push_back(std::move(probe));
    }
    Probe probe;
    probe.label = "Invalid Integer";
    probe.group = ProbeGroup::integer;
    probe.query.target = plan::ByKey{
        options.phone_column, *normalize_integer(datagen::absent_phone_digits())};
    plan.probes.push_back(std::move(probe));
  }

  if (options.row_probes) {
    for (std::size_t i = 0; i < quartiles.size(); ++i) {
      Probe probe;
      probe.label = "Row ID " + std::to_string(i + 1);
      probe.group = ProbeGroup::row;
      probe.query.target = plan::ByRow{quartiles[i]};
      probe.expected_row = quartiles[i];
      plan.probes.push_back(std::move(probe));
    }
    Probe probe;
    probe.label = "Invalid Row";
    probe.group = ProbeGroup::row;
    probe.query.target = plan::ByRow{dataset.row_count + 1};
    plan.probes.push_back(std::move(probe));
  }

  return plan;
}

// ---------------------------------------------------------------------------
// Execution

namespace {

struct CellRun {
  std::vector<scan::MatchResult> matches;
  std::uint64_t bytes_scanned = 0;
};

bool combo_supported(scan::Strategy strategy, const Probe& probe) {
  const bool by_row = std::holds_alternative<plan::ByRow>(probe.query.target);
  if (!by_row) return true;
  // Positional probes make sense for index and positional scans only.
  return strategy == scan::Strategy::index_lookup ||
         strategy == scan::Strategy::field_scan;
}

CellRun run_once(scan::Strategy strategy, const Probe& probe, const BenchPlan& plan,
                 const plan::IndexSet& indexes) {
  CellRun out;
  const auto* by_key = std::get_if<plan::ByKey>(&probe.query.target);

  // field_scan cells probe with early exit: that is the unindexed-engine
  // behavior the position-dependent tables show. (The planner's field_scan
  // keeps scanning for full result sets; the harness wants the stop-at-hit
  // variant.)
  if (strategy == scan::Strategy::field_scan && by_key) {
    scan::ScanStats stats;
    out.matches = scan::field_scan(plan.dataset, by_key->column, by_key->key,
                                   /*early_exit=*/true, &stats);
    out.bytes_scanned = stats.bytes_scanned;
    return out;
  }
  if (strategy == scan::Strategy::line_scan_first && by_key) {
    if (by_key->key.value.empty()) return out;
    scan::Matcher matcher(by_key->key.value);
    scan::ScanStats stats;
    auto raw = scan::line_scan(plan.dataset, matcher, scan::ScanMode::first, &stats);
    for (auto& m : raw) {
      if (m.record.fields.size() <= by_key->column) continue;
      auto candidate = make_key(by_key->key.kind, m.record.fields[by_key->column]);
      if (candidate && candidate->value == by_key->key.value) {
        out.matches.push_back(std::move(m));
      }
    }
    out.bytes_scanned = stats.bytes_scanned;
    return out;
  }

  plan::Query query = probe.query;
  switch (strategy) {
    case scan::Strategy::index_lookup:
      query.strategy = plan::Override::index;
      break;
    case scan::Strategy::chunked_scan:
      query.strategy = plan::Override::chunked_scan;
      break;
    case scan::Strategy::line_scan_all:
      query.strategy = plan::Override::line_scan;
      break;
    case scan::Strategy::field_scan:
      query.strategy = plan::Override::field_scan;
      break;
    case scan::Strategy::line_scan_first:
      throw plan::StrategyUnavailable("line_scan_first needs a key probe");
  }
  auto result = plan::execute(query, plan.dataset, indexes, {plan.chunk_rows, 0});
  out.matches = std::move(result.matches);
  out.bytes_scanned = result.bytes_scanned;
  return out;
}

void verify_cell(scan::Strategy strategy, const Probe& probe, const CellRun& run) {
  const std::string where = std::string(scan::strategy_name(strategy)) + " / " +
                            probe.label;
  if (!probe.expected_row) {
    if (!run.matches.empty()) {
      throw CorrectnessFailure(where + ": expected no matches, got " +
                               std::to_string(run.matches.size()));
    }
    return;
  }
  if (run.matches.size() != 1) {
    throw CorrectnessFailure(where + ": expected exactly 1 match, got " +
                             std::to_string(run.matches.size()));
  }
  const std::uint64_t row = run.matches[0].record.row_number;
  if (row == 0) {
    throw CorrectnessFailure(where +
                             ": matched row number unresolved (row-offset "
                             "index not loaded)");
  }
  if (row != *probe.expected_row) {
    throw CorrectnessFailure(where + ": matched row " + std::to_string(row) +
                             ", expected " + std::to_string(*probe.expected_row));
  }
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

}  // namespace

BenchReport run(const BenchPlan& plan, const plan::IndexSet& indexes,
                RunOptions options) {
  Clock clock = options.clock ? options.clock : steady_clock_ns();
  BenchReport report;
  report.environment =
      options.environment ? *options.environment : collect_environment(plan.dataset);
  report.environment.repetitions = plan.repetitions;
  report.environment.warmup = plan.warmup;

  for (scan::Strategy strategy : plan.strategies) {
    for (const Probe& probe : plan.probes) {
      if (!combo_supported(strategy, probe)) continue;
      std::vector<double> times;
      times.reserve(plan.repetitions);
      std::uint64_t matches = 0;
      std::uint64_t bytes = 0;
      const std::uint32_t total = plan.warmup + std::max(1u, plan.repetitions);
      for (std::uint32_t i = 0; i < total; ++i) {
        const std::uint64_t t0 = clock();
        CellRun cell_run = run_once(strategy, probe, plan, indexes);
        const std::uint64_t t1 = clock();
        verify_cell(strategy, probe, cell_run);
        if (i >= plan.warmup) {
          times.push_back(static_cast<double>(t1 - t0) / 1e9);
          matches = cell_run.matches.size();
          bytes = cell_run.bytes_scanned;
        }
      }
      Cell cell;
      cell.strategy = strategy;
      cell.probe_label = probe.label;
      cell.group = probe.group;
      cell.elapsed_s = median(std::move(times));
      cell.matches = matches;
      cell.bytes_scanned = bytes;
      report.cells.push_back(std::move(cell));
    }
  }

  for (scan::Strategy strategy : plan.strategies) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const Cell& cell : report.cells) {
      if (cell.strategy != strategy) continue;
      sum += cell.elapsed_s;
      ++count;
    }
    if (count > 0) {
      report.averages.push_back({strategy, sum / static_cast<double>(count)});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string format_seconds(double s) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", s);
  return buf;
}

}  // namespace

std::string render_report(const BenchReport& report, ReportFormat format) {
  if (format == ReportFormat::json) {
    nlohmann::ordered_json j;
    j["environment"] = {
        {"os", report.environment.os},
        {"cpu", report.environment.cpu},
        {"kernels_backend", report.environment.kernels_backend},
        {"threads", report.environment.threads},
        {"corpus", report.environment.corpus},
        {"corpus_bytes", report.environment.corpus_bytes},
        {"corpus_rows", report.environment.corpus_rows},
        {"repetitions", report.environment.repetitions},
        {"warmup", report.environment.warmup},
    };
    auto cells = nlohmann::ordered_json::array();
    for (const Cell& cell : report.cells) {
      cells.push_back({
          {"strategy", scan::strategy_name(cell.strategy)},
          {"probe_label", cell.probe_label},
          {"probe_group", probe_group_name(cell.group)},
          {"elapsed_s", cell.elapsed_s},
          {"matches", cell.matches},
          {"bytes_scanned", cell.bytes_scanned},
      });
    }
    j["cells"] = std::move(cells);
    auto averages = nlohmann::ordered_json::array();
    for (const StrategyAverage& avg : report.averages) {
      averages.push_back({
          {"strategy", scan::strategy_name(avg.strategy)},
          {"avg_s", avg.avg_s},
      });
    }
    j["averages"] = std::move(averages);
    return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
  }

  // Markdown: column order follows the cells' strategy order; one table per
  // probe group, then the overall averages.
  std::string out;
  out += "# brix benchmark report\n\n";
  out += "- os: " + report.environment.os + "\n";
  out += "- cpu: " + report.environment.cpu + "\n";
  out += "- kernels: " + report.environment.kernels_backend + "\n";
  out += "- threads: " + std::to_string(report.environment.threads) + "\n";
  out += "- corpus: " + report.environment.corpus + " (" +
         std::to_string(report.environment.corpus_rows) + " rows, " +
         std::to_string(report.environment.corpus_bytes) + " bytes)\n";
  out += "- repetitions: " + std::to_string(report.environment.repetitions) +
         " (median), warmup: " + std::to_string(report.environment.warmup) + "\n";

  std::vector<scan::Strategy> strategy_order;
  for (const Cell& cell : report.cells) {
    if (std::find(strategy_order.begin(), strategy_order.end(), cell.strategy) ==
        strategy_order.end()) {
      strategy_order.push_back(cell.strategy);
    }
  }

  const ProbeGroup groups[] = {ProbeGroup::email, ProbeGroup::integer,
                               ProbeGroup::row};
  for (ProbeGroup group : groups) {
    std::vector<std::string> labels;
    for (const Cell& cell : report.cells) {
      if (cell.group != group) continue;
      if (std::find(labels.begin(), labels.end(), cell.probe_label) == labels.end()) {
        labels.push_back(cell.probe_label);
      }
    }
    if (labels.empty()) continue;
    out += "\n## Lookups by " + std::string(probe_group_name(group)) +
           " (seconds)\n\n";
    out += "| Probe |";
    for (auto s : strategy_order) {
      out += std::string(" ") + scan::strategy_name(s) + " |";
    }
    out += "\n|---|";
    for (std::size_t i = 0; i < strategy_order.size(); ++i) out += "---|";
    out += "\n";
    for (const auto& label : labels) {
      out += "| " + label + " |";
      for (auto s : strategy_order) {
        const Cell* found = nullptr;
        for (const Cell& cell : report.cells) {
          if (cell.strategy == s && cell.group == group && cell.probe_label == label) {
            found = &cell;
            break;
          }
        }
        out += found ? " " + format_seconds(found->elapsed_s) + " |" : " - |";
      }
      out += "\n";
    }
  }

  out += "\n## Overall average (seconds)\n\n";
  out += "| Strategy | Average Time |\n|---|---|\n";
  for (const StrategyAverage& avg : report.averages) {
    out += "| " + std::string(scan::strategy_name(avg.strategy)) + " | " +
           format_seconds(avg.avg_s) + " |\n";
  }
  return out;
}

}  // namespace brix::bench
