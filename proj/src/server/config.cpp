#include "newsroom/server/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace newsroom::server {
namespace {

namespace fs = std::filesystem;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <class Int>
Int parse_int(std::string_view v, int line, std::string_view key) {
  Int out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || v.empty()) {
    throw ConfigError("line " + std::to_string(line) + ": " + std::string(key) +
                      " expects an integer, got '" + std::string(v) + "'");
  }
  return out;
}

}  // namespace

bool ServerConfig::is_admin(std::string_view username) const {
  return std::find(admin_usernames.begin(), admin_usernames.end(), username) !=
         admin_usernames.end();
}

store::StoreOptions ServerConfig::store_options() const {
  store::StoreOptions o;
  o.password_iterations = password_iterations;
  o.max_blob_bytes = max_upload_bytes;
  return o;
}

ServerConfig parse_config(std::string_view text, const fs::path& base_dir) {
  ServerConfig c;
  bool have_data_dir = false;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "bind_address") {
      const std::size_t colon = value.rfind(':');
      if (colon == std::string_view::npos || colon == 0) {
        throw ConfigError("line " + std::to_string(line_no) + ": bind_address must be host:port");
      }
      c.host = std::string(value.substr(0, colon));
      c.port = parse_int<int>(value.substr(colon + 1), line_no, key);
      if (c.port < 0 || c.port > 65535) {
        throw ConfigError("line " + std::to_string(line_no) + ": port out of range");
      }
    } else if (key == "data_dir") {
      fs::path p{std::string(value)};
      c.data_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      have_data_dir = !value.empty();
    } else if (key == "max_upload_bytes") {
      c.max_upload_bytes = parse_int<std::uint64_t>(value, line_no, key);
      if (c.max_upload_bytes == 0) {
        throw ConfigError("line " + std::to_string(line_no) + ": max_upload_bytes must be > 0");
      }
    } else if (key == "site_title") {
      c.site_title = std::string(value);
    } else if (key == "site_link") {
      c.site_link = std::string(value);
    } else if (key == "site_description") {
      c.site_description = std::string(value);
    } else if (key == "admin_usernames") {
      c.admin_usernames.clear();
      std::size_t start = 0;
      while (start <= value.size()) {
        const std::size_t comma = value.find(',', start);
        const auto name = trim(value.substr(start, comma - start));
        if (!name.empty()) c.admin_usernames.emplace_back(name);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
    } else if (key == "password_iterations") {
      c.password_iterations = parse_int<int>(value, line_no, key);
      if (c.password_iterations < 1) {
        throw ConfigError("line " + std::to_string(line_no) + ": password_iterations must be >= 1");
      }
    } else if (key == "admin_ui_dir") {
      fs::path p{std::string(value)};
      c.admin_ui_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!have_data_dir) throw ConfigError("data_dir is required");
  return c;
}

ServerConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), file.parent_path());
}

std::string render_config(const ServerConfig& c) {
  std::ostringstream out;
  out << "bind_address = " << c.host << ':' << c.port << '\n'
      << "data_dir = " << c.data_dir.string() << '\n'
      << "max_upload_bytes = " << c.max_upload_bytes << '\n'
      << "site_title = " << c.site_title << '\n'
      << "site_link = " << c.site_link << '\n'
      << "site_description = " << c.site_description << '\n'
      << "admin_usernames = ";
  for (std::size_t i = 0; i < c.admin_usernames.size(); ++i) {
    out << (i ? "," : "") << c.admin_usernames[i];
  }
  out << '\n' << "password_iterations = " << c.password_iterations << '\n';
  if (c.admin_ui_dir) out << "admin_ui_dir = " << c.admin_ui_dir->string() << '\n';
  return std::move(out).str();
}

fs::path init_data_dir(const fs::path& data_dir) {
  if (fs::exists(data_dir) && (!fs::is_directory(data_dir) || !fs::is_empty(data_dir))) {
    throw ConfigError(data_dir.string() + " already exists and is not empty");
  }
  fs::create_directories(data_dir);
  ServerConfig c;
  c.data_dir = ".";
  // Opening a store lays out records.db and media/.
  store::Store created(data_dir, c.store_options());

  const fs::path config_file = data_dir / kConfigFileName;
  std::ofstream out(config_file);
  out << "# newsroom server configuration\n" << render_config(c);
  if (!out.flush()) throw ConfigError("cannot write " + config_file.string());
  return config_file;
}

}  // namespace newsroom::server
