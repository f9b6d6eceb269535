#pragma once

// Thin RAII wrapper over a read-only file descriptor with pread-style
// random access. Shared by the scanners and the index handles.

#include <cstddef>
#include <cstdint>
#include <filesystem>

namespace brix {

class File {
 public:
  explicit File(const std::filesystem::path& path);  // throws IoError
  ~File();

  File(File&& other) noexcept;
  File& operator=(File&& other) noexcept;
  File(const File&) = delete;
  File& operator=(const File&) = delete;

  std::uint64_t size() const { return size_; }
  const std::filesystem::path& path() const { return path_; }

  // Reads up to n bytes at offset; returns bytes read (short only at EOF).
  std::size_t pread(void* buf, std::size_t n, std::uint64_t offset) const;

  // Drops this file's pages from the OS cache (best effort).
  void evict_cache() const;

 private:
  int fd_ = -1;
  std::uint64_t size_ = 0;
  std::filesystem::path path_;
};

}  // namespace brix
