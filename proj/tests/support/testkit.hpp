#pragma once
// Shared helpers for the test binaries: scratch directories, fixtures,
// generators and the independent oracles the tests compare against.

#include <pthread.h>
#include <stdlib.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace testkit {

namespace fs = std::filesystem;

/// mkdtemp directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "newsroom-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(std::string_view leaf) const { return path_ / leaf; }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

inline void write_file(const fs::path& p, std::string_view bytes) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string fixture(std::string_view relative) {
  return read_file(fs::path(NEWSROOM_TESTDATA) / relative);
}

inline std::string random_bytes(std::mt19937_64& rng, std::size_t n) {
  std::string out(n, '\0');
  for (auto& c : out) c = static_cast<char>(rng() & 0xFF);
  return out;
}

/// ASCII words from a small alphabet, so that substring hits are common.
inline std::string random_word(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len,
                               std::string_view alphabet = "abcdeABCDE") {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string out(len(rng), 'a');
  for (auto& c : out) c = alphabet[pick(rng)];
  return out;
}

/// Oracle: ASCII-lowercase both strings, then scan every start position.
inline bool naive_contains_ci(std::string_view haystack, std::string_view needle) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string h = lower(haystack);
  const std::string n = lower(needle);
  if (n.size() > h.size()) return false;
  for (std::size_t i = 0; i + n.size() <= h.size(); ++i) {
    bool hit = true;
    for (std::size_t j = 0; j < n.size() && hit; ++j) hit = h[i + j] == n[j];
    if (hit) return true;
  }
  return false;
}

/// Oracle: chunks of five by explicit counting.
template <class T>
std::vector<std::vector<T>> chunk_by_five(const std::vector<T>& items) {
  std::vector<std::vector<T>> pages;
  for (const auto& x : items) {
    if (pages.empty() || pages.back().size() == 5) pages.emplace_back();
    pages.back().push_back(x);
  }
  return pages;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Runs `fn` on a thread whose stack is `stack_bytes`, rethrowing any
/// exception. Used to show work does not scale stack use with input depth.
inline void run_with_stack(std::size_t stack_bytes, const std::function<void()>& fn) {
  struct Ctx {
    const std::function<void()>* fn;
    std::exception_ptr error;
  } ctx{&fn, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, stack_bytes);
  pthread_t tid;
  const int rc = pthread_create(
      &tid, &attr,
      [](void* p) -> void* {
        auto* c = static_cast<Ctx*>(p);
        try {
          (*c->fn)();
        } catch (...) {
          c->error = std::current_exception();
        }
        return nullptr;
      },
      &ctx);
  pthread_attr_destroy(&attr);
  if (rc != 0) throw std::runtime_error("pthread_create failed");
  pthread_join(tid, nullptr);
  if (ctx.error) std::rethrow_exception(ctx.error);
}

}  // namespace testkit
