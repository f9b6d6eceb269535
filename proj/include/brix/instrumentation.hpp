#pragma once

// Process-wide counters used by tests to assert resource bounds that wall
// time cannot prove: how many records a chunked scan keeps buffered, and
// how many index/record reads a lookup performs. Benchmark cells run
// sequentially, so plain atomics are enough.

#include <atomic>
#include <cstdint>

namespace brix::instr {

struct Counters {
  std::atomic<std::int64_t> buffered_records{0};
  std::atomic<std::int64_t> buffered_records_peak{0};
  std::atomic<std::int64_t> buffered_bytes{0};
  std::atomic<std::int64_t> buffered_bytes_peak{0};
  std::atomic<std::uint64_t> record_reads{0};
  std::atomic<std::uint64_t> index_reads{0};
};

Counters& counters();

// Zeroes all counters and peaks.
void reset();

// Registers `records` rows spanning `bytes` entering (positive) or leaving
// (negative) a live buffer; maintains the peaks.
void track_buffered(std::int64_t records, std::int64_t bytes);

void count_record_read();
void count_index_read();

std::int64_t buffered_records_now();
std::int64_t buffered_records_peak();
std::int64_t buffered_bytes_peak();
std::uint64_t record_reads();
std::uint64_t index_reads();

}  // namespace brix::instr
