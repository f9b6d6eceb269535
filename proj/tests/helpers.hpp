#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles
// here deliberately avoid the library's own parsing/searching code paths.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace testutil {

namespace fs = std::filesystem;

// Self-cleaning unique temp directory.
struct TempDir {
  fs::path dir;

  explicit TempDir(const std::string& hint) {
    std::random_device rd;
    dir = fs::temp_directory_path() /
          ("brix_" + hint + "_" + std::to_string(rd()) + "_" +
           std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  fs::path path(const std::string& name) const { return dir / name; }
};

inline void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Naive substring search, the Boyer-Moore oracle.
inline std::optional<std::size_t> naive_find(std::string_view pattern,
                                             std::string_view haystack) {
  if (pattern.empty() || pattern.size() > haystack.size()) return std::nullopt;
  for (std::size_t i = 0; i + pattern.size() <= haystack.size(); ++i) {
    if (haystack.compare(i, pattern.size(), pattern) == 0) return i;
  }
  return std::nullopt;
}

// Naive line reader: splits on '\n', independent of the csv module. Good
// for generated corpora (no quoting, LF terminators).
inline std::vector<std::string> naive_lines(const fs::path& path) {
  const std::string content = read_file(path);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string::npos) {
      lines.push_back(content.substr(pos));
      break;
    }
    lines.push_back(content.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

// Naive comma split (no quoting), for generated corpora.
inline std::vector<std::string> naive_split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  for (;;) {
    std::size_t c = line.find(',', pos);
    if (c == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, c - pos));
    pos = c + 1;
  }
}

// Data rows (header dropped) of a generated corpus via the naive reader.
inline std::vector<std::vector<std::string>> naive_rows(const fs::path& path) {
  auto lines = naive_lines(path);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    rows.push_back(naive_split(lines[i]));
  }
  return rows;
}

}  // namespace testutil
