#include "record_file.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "newsroom/store/store.hpp"

namespace newsroom::store::detail {
namespace {

[[noreturn]] void io_error(const std::string& what, const std::filesystem::path& p) {
  throw StoreError(StoreError::Kind::io, what + " " + p.string() + ": " + std::strerror(errno));
}

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;

  int get() const { return fd_; }
  int release() { return std::exchange(fd_, -1); }

 private:
  int fd_;
};

}  // namespace

void fsync_directory(const std::filesystem::path& dir) {
  Fd fd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY));
  if (fd.get() < 0) io_error("open directory", dir);
  if (::fsync(fd.get()) != 0) io_error("fsync directory", dir);
}

void write_atomically(const std::filesystem::path& target, std::string_view bytes) {
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    Fd fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
    if (fd.get() < 0) io_error("create", tmp);
    std::size_t written = 0;
    while (written < bytes.size()) {
      const ssize_t n = ::write(fd.get(), bytes.data() + written, bytes.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        io_error("write", tmp);
      }
      written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd.get()) != 0) io_error("fsync", tmp);
    if (::close(fd.release()) != 0) io_error("close", tmp);
  }
  if (::rename(tmp.c_str(), target.c_str()) != 0) io_error("rename", tmp);
  fsync_directory(target.parent_path());
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    io_error("open", path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

}  // namespace newsroom::store::detail
