#include "newsroom/client/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "newsroom/core/text.hpp"

namespace newsroom::client {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

}  // namespace

int exit_code(ClientError::Kind kind) {
  using K = ClientError::Kind;
  switch (kind) {
    case K::validation:
    case K::not_configured:
    case K::no_such_draft:
    case K::file_not_found:
    case K::format_mismatch:
    case K::not_found:
    case K::unknown_category:
    case K::no_more_pages:
      return 2;
    case K::auth:
    case K::network:
    case K::text_upload_failed:
    case K::media_upload_failed:
      return 3;
    case K::protocol:
      return 4;
    case K::server:
      return 1;
  }
  return 1;
}

std::string ServerUrl::origin() const { return "http://" + host + ":" + std::to_string(port); }

std::optional<ServerUrl> parse_server_url(std::string_view url) {
  constexpr std::string_view scheme = "http://";
  if (url.substr(0, scheme.size()) != scheme) return std::nullopt;
  url.remove_prefix(scheme.size());

  const std::size_t slash = url.find('/');
  std::string_view authority = url.substr(0, slash);
  std::string_view path = slash == std::string_view::npos ? std::string_view{} : url.substr(slash);
  if (authority.empty() || authority.find_first_of("@?# ") != std::string_view::npos) {
    return std::nullopt;
  }
  if (path.find_first_of("?# ") != std::string_view::npos) return std::nullopt;

  ServerUrl out;
  const std::size_t colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    const auto digits = authority.substr(colon + 1);
    int port = 0;
    const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (digits.empty() || ec != std::errc{} || p != digits.data() + digits.size() || port < 1 ||
        port > 65535) {
      return std::nullopt;
    }
    out.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) return std::nullopt;
  out.host = std::string(authority);
  while (!path.empty() && path.back() == '/') path.remove_suffix(1);
  out.base_path = std::string(path);
  return out;
}

ValidationResult ClientConfig::validate() const {
  ValidationResult r;
  if (username.empty()) r.errors.push_back({"username", "must not be empty"});
  if (password.empty()) r.errors.push_back({"password", "must not be empty"});
  if (server_url.empty()) {
    r.errors.push_back({"server_url", "must not be empty"});
  } else if (!parse_server_url(server_url)) {
    r.errors.push_back({"server_url", "expected http://host[:port][/path]"});
  }
  return r;
}

ServerUrl ClientConfig::url() const {
  auto u = parse_server_url(server_url);
  if (!u) throw ClientError(ClientError::Kind::validation, "invalid server_url '" + server_url + "'");
  return *u;
}

std::string render_masked(const ClientConfig& c) {
  return "username:   " + c.username + "\n" +
         "password:   " + std::string(text::code_point_count(c.password), '*') + "\n" +
         "server_url: " + c.server_url + "\n";
}

fs::path default_data_dir() {
  if (const char* home = std::getenv("NEWSROOM_REPORTER_HOME"); home && *home) return home;
  if (const char* xdg = std::getenv("XDG_DATA_HOME"); xdg && *xdg) {
    return fs::path(xdg) / "newsroom-reporter";
  }
  if (const char* home = std::getenv("HOME"); home && *home) {
    return fs::path(home) / ".local" / "share" / "newsroom-reporter";
  }
  return fs::current_path() / ".newsroom-reporter";
}

namespace detail {

void replace_file(const fs::path& path, std::string_view contents) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out.flush()) {
      throw ClientError(ClientError::Kind::validation, "cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::optional<std::string> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

}  // namespace detail

ConfigStore::ConfigStore(fs::path data_dir) : data_dir_(std::move(data_dir)) {}

std::optional<ClientConfig> ConfigStore::load() const {
  const auto raw = detail::slurp(data_dir_ / kConfigFile);
  if (!raw) return std::nullopt;
  try {
    const json j = json::parse(*raw);
    return ClientConfig{j.at("username").get<std::string>(), j.at("password").get<std::string>(),
                        j.at("server_url").get<std::string>()};
  } catch (const json::exception& e) {
    throw ClientError(ClientError::Kind::validation,
                      "unreadable config " + (data_dir_ / kConfigFile).string() + ": " + e.what());
  }
}

ClientConfig ConfigStore::require() const {
  auto c = load();
  if (!c) throw ClientError(ClientError::Kind::not_configured, "run configure first");
  return *c;
}

void ConfigStore::store(const ClientConfig& c) {
  const auto check = c.validate();
  if (!check.ok()) throw ClientError(ClientError::Kind::validation, "invalid config", check.errors);
  const json j = {{"username", c.username}, {"password", c.password}, {"server_url", c.server_url}};
  detail::replace_file(data_dir_ / kConfigFile, j.dump(2) + "\n");
  fs::permissions(data_dir_ / kConfigFile, fs::perms::owner_read | fs::perms::owner_write);
}

ClientConfig ConfigStore::configure(const ClientConfig& c) {
  store(c);
  clear_token();
  return c;
}

ClientConfig ConfigStore::edit(const ConfigEdit& e) {
  ClientConfig c = require();
  if (e.username) c.username = *e.username;
  if (e.password) c.password = *e.password;
  if (e.server_url) c.server_url = *e.server_url;
  store(c);
  // A token belongs to one user on one server.
  if (e.username || e.server_url) clear_token();
  return c;
}

std::optional<std::string> ConfigStore::cached_token() const {
  auto t = detail::slurp(data_dir_ / kTokenFile);
  if (!t || t->empty()) return std::nullopt;
  return t;
}

void ConfigStore::save_token(std::string_view token) {
  detail::replace_file(data_dir_ / kTokenFile, token);
}

void ConfigStore::clear_token() {
  std::error_code ec;
  fs::remove(data_dir_ / kTokenFile, ec);
}

}  // namespace newsroom::client
