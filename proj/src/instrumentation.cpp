#include "brix/instrumentation.hpp"

namespace brix::instr {

Counters& counters() {
  static Counters c;
  return c;
}

void reset() {
  auto& c = counters();
  c.buffered_records.store(0, std::memory_order_relaxed);
  c.buffered_records_peak.store(0, std::memory_order_relaxed);
  c.buffered_bytes.store(0, std::memory_order_relaxed);
  c.buffered_bytes_peak.store(0, std::memory_order_relaxed);
  c.record_reads.store(0, std::memory_order_relaxed);
  c.index_reads.store(0, std::memory_order_relaxed);
}

namespace {

void bump_peak(std::atomic<std::int64_t>& peak, std::int64_t value) {
  std::int64_t seen = peak.load(std::memory_order_relaxed);
  while (value > seen &&
         !peak.compare_exchange_weak(seen, value, std::memory_order_relaxed)) {
  }
}

}  // namespace

void track_buffered(std::int64_t records, std::int64_t bytes) {
  auto& c = counters();
  std::int64_t now_records =
      c.buffered_records.fetch_add(records, std::memory_order_relaxed) + records;
  std::int64_t now_bytes =
      c.buffered_bytes.fetch_add(bytes, std::memory_order_relaxed) + bytes;
  bump_peak(c.buffered_records_peak, now_records);
  bump_peak(c.buffered_bytes_peak, now_bytes);
}

void count_record_read() {
  counters().record_reads.fetch_add(1, std::memory_order_relaxed);
}

void count_index_read() {
  counters().index_reads.fetch_add(1, std::memory_order_relaxed);
}

std::int64_t buffered_records_now() {
  return counters().buffered_records.load(std::memory_order_relaxed);
}
std::int64_t buffered_records_peak() {
  return counters().buffered_records_peak.load(std::memory_order_relaxed);
}
std::int64_t buffered_bytes_peak() {
  return counters().buffered_bytes_peak.load(std::memory_order_relaxed);
}
std::uint64_t record_reads() {
  return counters().record_reads.load(std::memory_order_relaxed);
}
std::uint64_t index_reads() {
  return counters().index_reads.load(std::memory_order_relaxed);
}

}  // namespace brix::instr
