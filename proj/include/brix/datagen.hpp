#pragma once

// Deterministic synthetic breach-corpus generator. Every cell is a pure
// function of (seed, row, column), so single rows are reconstructible
// without scanning and identical specs produce byte-identical files.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "brix/core.hpp"

namespace brix::datagen {

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Plant {
  std::uint64_t row_number = 0;  // 1-based
  std::string email;
  std::string phone;
};

struct GenSpec {
  std::uint64_t rows = 0;
  std::uint32_t columns = 59;
  std::uint64_t seed = 0;
  std::uint32_t email_column = 5;
  std::uint32_t phone_column = 7;
  std::vector<Plant> planted;  // row_numbers strictly increasing
};

// Throws SpecError with the first violated constraint.
void validate(const GenSpec& spec);

DatasetDescriptor generate_dataset(const GenSpec& spec,
                                   const std::filesystem::path& out_path);

// ceil(N/4), ceil(N/2), ceil(3N/4), N. Throws std::invalid_argument when
// row_count < 4.
std::vector<std::uint64_t> quartile_rows(std::uint64_t row_count);

std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic per-row values as emitted by generate_dataset (unless the
// row is planted). Generated emails live under @synth.example; the
// @absent.invalid namespace is reserved and never emitted.
std::string generated_email(std::uint64_t seed, std::uint64_t row);
std::string generated_phone(std::uint64_t seed, std::uint64_t row);

std::string absent_email(unsigned salt = 0);
std::string absent_phone_digits(unsigned salt = 0);

// Default plants used by the CLI and benchmarks: one per quartile row.
std::vector<Plant> quartile_plants(std::uint64_t rows);

// Plant-manifest sidecar (JSON): records the GenSpec so benchmarks can
// recover planted keys and the corpus shape.
std::filesystem::path default_manifest_path(const std::filesystem::path& corpus);
void write_manifest(const GenSpec& spec, const std::filesystem::path& corpus,
                    const std::filesystem::path& manifest_path);
GenSpec read_manifest(const std::filesystem::path& manifest_path);

}  // namespace brix::datagen
