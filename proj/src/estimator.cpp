#include "brix/estimator.hpp"

#include <chrono>
#include <vector>

#include "brix/csv.hpp"
#include "brix/file.hpp"
#include "brix/instrumentation.hpp"

namespace brix::est {

double linear_estimate(double sample_value, double sample_size, double target_size) {
  if (sample_size == 0.0) {
    throw ZeroSample("sample size is zero");
  }
  if (target_size == sample_size) {
    return sample_value;  // extrapolating a full sample is the identity
  }
  return (sample_value * target_size) / sample_size;
}

double estimate_memory(const SampleProfile& profile, double target_size_bytes) {
  return linear_estimate(static_cast<double>(profile.sample_mem_bytes),
                         static_cast<double>(profile.sample_size_bytes),
                         target_size_bytes);
}

double estimate_time(const SampleProfile& profile, double target_size_bytes) {
  return linear_estimate(profile.sample_time_s,
                         static_cast<double>(profile.sample_size_bytes),
                         target_size_bytes);
}

Estimate estimate_all(const SampleProfile& profile, double target_size_bytes) {
  Estimate e;
  e.target_size_bytes = target_size_bytes;
  e.est_mem_bytes = estimate_memory(profile, target_size_bytes);
  e.est_time_s = estimate_time(profile, target_size_bytes);
  return e;
}

SampleProfile profile_sample(const DatasetDescriptor& dataset,
                             std::uint64_t sample_bytes, ProfileOptions options) {
  File file(dataset.path);
  if (sample_bytes > file.size()) {
    throw std::invalid_argument("sample_bytes exceeds the file size");
  }

  // Truncate the sample at a line boundary: the largest line end at or
  // before sample_bytes.
  std::uint64_t boundary = 0;
  if (sample_bytes == file.size()) {
    boundary = file.size();
  } else {
    std::vector<char> window(64 << 10);
    std::uint64_t pos = sample_bytes;
    while (pos > 0 && boundary == 0) {
      const std::size_t take =
          static_cast<std::size_t>(std::min<std::uint64_t>(window.size(), pos));
      file.pread(window.data(), take, pos - take);
      for (std::size_t i = take; i-- > 0;) {
        if (window[i] == '\n') {
          boundary = pos - take + i + 1;
          break;
        }
      }
      pos -= take;
    }
    if (boundary == 0) {
      throw std::invalid_argument("sample smaller than one record");
    }
  }

  instr::reset();
  const auto t0 = std::chrono::steady_clock::now();
  csv::ChunkReader reader(dataset, options.chunk_rows,
                          csv::MalformedPolicy::skip_and_count, boundary);
  std::uint64_t rows = 0;
  while (auto chunk = reader.next()) {
    rows += chunk->records.size();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  SampleProfile profile;
  profile.sample_size_bytes = boundary;
  profile.sample_mem_bytes = static_cast<std::uint64_t>(instr::buffered_bytes_peak());
  profile.sample_time_s = elapsed;
  (void)rows;
  return profile;
}

}  // namespace brix::est
