#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "newsroom/core/model.hpp"

namespace newsroom::client {

class ClientError : public std::runtime_error {
 public:
  enum class Kind {
    validation,
    not_configured,
    no_such_draft,
    file_not_found,
    format_mismatch,
    not_found,
    unknown_category,
    no_more_pages,
    auth,
    network,
    text_upload_failed,
    media_upload_failed,
    protocol,
    server,
  };

  ClientError(Kind kind, const std::string& what, std::vector<FieldError> fields = {})
      : std::runtime_error(what), kind_(kind), fields_(std::move(fields)) {}

  Kind kind() const { return kind_; }
  const std::vector<FieldError>& fields() const { return fields_; }
  /// Attachment index for media_upload_failed.
  std::optional<std::size_t> media_index;
  /// HTTP status behind the error, if one was received.
  int http_status = 0;

 private:
  Kind kind_;
  std::vector<FieldError> fields_;
};

/// Process exit code for the CLI: 2 local/validation, 3 network or auth,
/// 4 protocol, 1 anything else.
int exit_code(ClientError::Kind kind);

/// http://host[:port][/base]
struct ServerUrl {
  std::string host;
  int port = 80;
  std::string base_path;  // no trailing slash; empty for the root

  std::string origin() const;
};

std::optional<ServerUrl> parse_server_url(std::string_view url);

struct ClientConfig {
  std::string username;
  std::string password;
  std::string server_url;

  ValidationResult validate() const;
  ServerUrl url() const;

  friend bool operator==(const ClientConfig&, const ClientConfig&) = default;
};

struct ConfigEdit {
  std::optional<std::string> username;
  std::optional<std::string> password;
  std::optional<std::string> server_url;
};

/// Config display with the password replaced by asterisks.
std::string render_masked(const ClientConfig& config);

/// Default application data directory: $NEWSROOM_REPORTER_HOME, else
/// $XDG_DATA_HOME/newsroom-reporter, else ~/.local/share/newsroom-reporter.
std::filesystem::path default_data_dir();

/// Config file and cached session token under one data directory.
class ConfigStore {
 public:
  explicit ConfigStore(std::filesystem::path data_dir);

  static constexpr std::string_view kConfigFile = "config.json";
  static constexpr std::string_view kTokenFile = "session.token";

  std::optional<ClientConfig> load() const;
  /// Throws not_configured ("run configure first") when absent.
  ClientConfig require() const;
  ClientConfig configure(const ClientConfig& config);
  ClientConfig edit(const ConfigEdit& edit);

  std::optional<std::string> cached_token() const;
  void save_token(std::string_view token);
  void clear_token();

  const std::filesystem::path& data_dir() const { return data_dir_; }

 private:
  void store(const ClientConfig& config);

  std::filesystem::path data_dir_;
};

namespace detail {
/// Writes through a sibling temp file and rename.
void replace_file(const std::filesystem::path& path, std::string_view contents);
std::optional<std::string> slurp(const std::filesystem::path& path);
}  // namespace detail

}  // namespace newsroom::client
