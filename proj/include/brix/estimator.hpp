#pragma once

// Linear extrapolation of full-corpus memory/time from a sample chunk:
// estimate = (sample_value * target_size) / sample_size. The estimates
// are lower bounds by construction; callers should present them as such.

#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include "brix/core.hpp"

namespace brix::est {

struct ZeroSample : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SampleProfile {
  std::uint64_t sample_size_bytes = 0;
  std::uint64_t sample_mem_bytes = 0;  // peak buffered bytes, not OS RSS
  double sample_time_s = 0.0;
};

enum class Model : std::uint8_t { linear };

struct Estimate {
  double target_size_bytes = 0.0;
  double est_mem_bytes = 0.0;
  double est_time_s = 0.0;
  Model model = Model::linear;
};

// The formula nucleus, unit-agnostic: pass sizes in any single consistent
// unit. Computed as (sample_value * target) / sample_size in double;
// target == sample_size returns sample_value unchanged. Throws ZeroSample
// when sample_size == 0.
double linear_estimate(double sample_value, double sample_size, double target_size);

inline double estimate_memory(double sample_mem, double sample_size,
                              double target_size) {
  return linear_estimate(sample_mem, sample_size, target_size);
}
inline double estimate_time(double sample_time, double sample_size,
                            double target_size) {
  return linear_estimate(sample_time, sample_size, target_size);
}

double estimate_memory(const SampleProfile& profile, double target_size_bytes);
double estimate_time(const SampleProfile& profile, double target_size_bytes);
Estimate estimate_all(const SampleProfile& profile, double target_size_bytes);

struct ProfileOptions {
  std::size_t chunk_rows = 65536;
};

// Processes only the sample prefix (truncated at a line boundary) with the
// chunked reader, recording wall time and peak buffered bytes via the
// instrumentation counters.
SampleProfile profile_sample(const DatasetDescriptor& dataset,
                             std::uint64_t sample_bytes,
                             ProfileOptions options = {});

constexpr double kMiB = 1024.0 * 1024.0;
constexpr double kGiB = 1024.0 * kMiB;  // 1 GB = 1024 MB convention

}  // namespace brix::est
