#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "newsroom/store/store.hpp"

namespace newsroom::server {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Server settings, stored as UTF-8 `key = value` lines. `#` starts a
/// comment line. Keys:
///
///   bind_address         host:port (port 0 picks a free port)
///   data_dir             store directory; relative paths resolve against
///                        the config file's directory
///   max_upload_bytes     largest accepted media blob (default 10 MiB)
///   site_title, site_link, site_description   RSS channel metadata
///   admin_usernames      comma-separated
///   password_iterations  PBKDF2 rounds for new passwords
///   admin_ui_dir         optional static files served under /admin/
struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir;
  std::uint64_t max_upload_bytes = store::kDefaultMaxBlobBytes;
  std::string site_title = "Newsroom";
  std::string site_link = "http://localhost:8080/";
  std::string site_description = "Latest field reports";
  std::vector<std::string> admin_usernames;
  int password_iterations = store::kDefaultPasswordIterations;
  std::optional<std::filesystem::path> admin_ui_dir;

  bool is_admin(std::string_view username) const;
  store::StoreOptions store_options() const;
};

/// `base_dir` anchors relative paths. Throws ConfigError naming the line.
ServerConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ServerConfig load_config(const std::filesystem::path& file);
std::string render_config(const ServerConfig& config);

inline constexpr std::string_view kConfigFileName = "server.conf";

/// Creates `data_dir` with an empty store and a default config file, and
/// returns the config path. Throws ConfigError if `data_dir` exists and is
/// not empty.
std::filesystem::path init_data_dir(const std::filesystem::path& data_dir);

}  // namespace newsroom::server
