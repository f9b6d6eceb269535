#include "brix/file.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

#include "brix/core.hpp"

namespace brix {

File::File(const std::filesystem::path& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd_ < 0) {
    throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  }
  struct ::stat st{};
  if (::fstat(fd_, &st) != 0) {
    int err = errno;
    ::close(fd_);
    fd_ = -1;
    throw IoError("cannot stat " + path.string() + ": " + std::strerror(err));
  }
  size_ = static_cast<std::uint64_t>(st.st_size);
}

File::~File() {
  if (fd_ >= 0) ::close(fd_);
}

File::File(File&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)),
      size_(other.size_),
      path_(std::move(other.path_)) {}

File& File::operator=(File&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
    size_ = other.size_;
    path_ = std::move(other.path_);
  }
  return *this;
}

std::size_t File::pread(void* buf, std::size_t n, std::uint64_t offset) const {
  auto* out = static_cast<char*>(buf);
  std::size_t total = 0;
  while (total < n) {
    ssize_t got = ::pread(fd_, out + total, n - total,
                          static_cast<off_t>(offset + total));
    if (got < 0) {
      if (errno == EINTR) continue;
      throw IoError("pread failed on " + path_.string() + ": " +
                    std::strerror(errno));
    }
    if (got == 0) break;  // EOF
    total += static_cast<std::size_t>(got);
  }
  return total;
}

void File::evict_cache() const {
#if defined(POSIX_FADV_DONTNEED)
  ::posix_fadvise(fd_, 0, 0, POSIX_FADV_DONTNEED);
#endif
}

}  // namespace brix
