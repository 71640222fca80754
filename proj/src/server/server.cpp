#include "newsroom/server/server.hpp"

#include <charconv>
#include <chrono>
#include <iostream>
#include <mutex>
#include <optional>

#include "httplib.h"
#include "newsroom/wire/multipart.hpp"
#include "newsroom/wire/news_xml.hpp"
#include "newsroom/wire/rss.hpp"
#include "newsroom/wire/status.hpp"
#include "newsroom/xml/event.hpp"

namespace newsroom::server {
namespace {

using httplib::Request;
using httplib::Response;
using store::StoreError;
using wire::StatusPayload;

constexpr std::string_view kXmlType = "application/xml; charset=utf-8";
constexpr std::string_view kRssType = "application/rss+xml; charset=utf-8";
/// Allowance for multipart framing and the small form fields around a blob.
constexpr std::uint64_t kMultipartOverhead = 64 * 1024;

thread_local std::optional<std::chrono::steady_clock::time_point> request_started;

void send_xml(Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, std::string(kXmlType));
}

void send_status(Response& res, int status, const StatusPayload& payload) {
  send_xml(res, status, wire::encode_status(payload));
}

void send_error(Response& res, int status, std::string message,
                std::vector<FieldError> detail = {}) {
  send_status(res, status, StatusPayload::error(std::move(message), std::move(detail)));
}

int http_status(StoreError::Kind kind) {
  switch (kind) {
    case StoreError::Kind::validation: return 422;
    case StoreError::Kind::duplicate_username: return 409;
    case StoreError::Kind::bad_credentials: return 401;
    case StoreError::Kind::not_found: return 404;
    case StoreError::Kind::unknown_category: return 404;
    case StoreError::Kind::format_mismatch: return 415;
    case StoreError::Kind::blob_too_large: return 413;
    case StoreError::Kind::corrupt:
    case StoreError::Kind::io: return 500;
  }
  return 500;
}

std::optional<std::int64_t> parse_id(std::string_view s) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || v <= 0) return std::nullopt;
  return v;
}

std::optional<std::string> param(const Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

std::string mime_type(const MediaAttachment& m) {
  if (m.format == "jpeg") return "image/jpeg";
  if (m.format == "mp3") return "audio/mpeg";
  if (m.kind == MediaKind::video) return "video/" + m.format;
  return "application/octet-stream";
}

/// Media format from the upload's filename extension, falling back to its
/// content type.
std::string upload_format(const wire::FormPart& file) {
  if (file.filename) {
    const auto dot = file.filename->rfind('.');
    if (dot != std::string::npos) return normalize_format(file.filename->substr(dot + 1));
  }
  if (file.content_type) {
    if (*file.content_type == "image/jpeg") return "jpeg";
    if (*file.content_type == "audio/mpeg") return "mp3";
    const auto slash = file.content_type->find('/');
    if (slash != std::string::npos) return normalize_format(file.content_type->substr(slash + 1));
  }
  return {};
}

const wire::FormPart* find_part(const std::vector<wire::FormPart>& parts, std::string_view name) {
  for (const auto& p : parts) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

}  // namespace

struct NewsServer::Impl {
  explicit Impl(ServerConfig cfg)
      : config(std::move(cfg)), store(config.data_dir, config.store_options()) {}

  ServerConfig config;
  store::Store store;
  httplib::Server http;
  int port = -1;
  std::mutex log_mutex;
  LogSink log_sink = [](std::string_view line) { std::cout << line << std::endl; };

  void install_routes();

  /// Runs `fn`, translating domain errors into status responses.
  template <class Fn>
  void guarded(Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const StoreError& e) {
      send_error(res, http_status(e.kind()), e.what(), e.fields());
    } catch (const wire::MultipartError& e) {
      send_error(res, 400, e.what());
    } catch (const wire::ProtocolError& e) {
      send_error(res, 400, e.what());
    } catch (const xml::XmlError& e) {
      send_error(res, 400, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  }

  std::optional<std::string> session_user(const Request& req) const {
    std::string token = req.get_header_value("X-Auth-Token");
    if (token.empty()) token = req.get_param_value("token");
    if (token.empty()) return std::nullopt;
    return store.session_user(token);
  }

  /// Sends 401 and returns nullopt when the request carries no valid token.
  std::optional<std::string> require_user(const Request& req, Response& res) const {
    auto user = session_user(req);
    if (!user) send_error(res, 401, "authentication required");
    return user;
  }

  /// Sends 401/403 and returns false unless the request comes from an admin.
  bool require_admin(const Request& req, Response& res) const {
    const auto user = require_user(req, res);
    if (!user) return false;
    if (!config.is_admin(*user)) {
      send_error(res, 403, "admin rights required");
      return false;
    }
    return true;
  }

  bool viewer_is_admin(const Request& req) const {
    const auto user = session_user(req);
    return user && config.is_admin(*user);
  }

  void handle_register(const Request& req, Response& res);
  void handle_login(const Request& req, Response& res);
  void handle_create(const Request& req, Response& res);
  void handle_update(const Request& req, Response& res);
  void handle_media_upload(const Request& req, Response& res,
                           const httplib::ContentReader& reader);
  void handle_search(const Request& req, Response& res);
  void handle_list(const Request& req, Response& res);
  void handle_get(const Request& req, Response& res);
  void handle_media_get(const Request& req, Response& res);
  void handle_feed(const Request& req, Response& res);
  void handle_set_status(const Request& req, Response& res);
  void handle_delete(const Request& req, Response& res);
};

void NewsServer::Impl::install_routes() {
  http.set_payload_max_length(config.max_upload_bytes + kMultipartOverhead);
  http.set_tcp_nodelay(true);

  http.set_pre_routing_handler([](const Request&, Response&) {
    request_started = std::chrono::steady_clock::now();
    return httplib::Server::HandlerResponse::Unhandled;
  });
  http.set_logger([this](const Request& req, const Response& res) {
    long long ms = 0;
    if (request_started) {
      ms = std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - *request_started)
               .count();
      request_started.reset();
    }
    const std::string line =
        req.method + " " + req.path + " " + std::to_string(res.status) + " " + std::to_string(ms) + "ms";
    std::lock_guard lock(log_mutex);
    log_sink(line);
  });
  http.set_error_handler([](const Request&, Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    const std::string message = res.status == 404   ? "not found"
                                : res.status == 413 ? "request body too large"
                                                    : httplib::status_message(res.status);
    send_error(res, res.status, message);
    return httplib::Server::HandlerResponse::Handled;
  });

  auto bind = [this](void (Impl::*fn)(const Request&, Response&)) {
    return [this, fn](const Request& req, Response& res) {
      guarded(res, [&] { (this->*fn)(req, res); });
    };
  };

  http.Post("/api/register", bind(&Impl::handle_register));
  http.Post("/api/login", bind(&Impl::handle_login));
  http.Post("/api/message", bind(&Impl::handle_create));
  http.Post(R"(/api/message/(\d+)/update)", bind(&Impl::handle_update));
  http.Post("/api/media", [this](const Request& req, Response& res,
                                 const httplib::ContentReader& reader) {
    guarded(res, [&] { handle_media_upload(req, res, reader); });
  });
  http.Get("/api/search", bind(&Impl::handle_search));
  http.Get("/api/messages", bind(&Impl::handle_list));
  http.Get(R"(/api/message/(\d+))", bind(&Impl::handle_get));
  http.Get("/api/categories", [this](const Request&, Response& res) {
    guarded(res, [&] { send_xml(res, 200, wire::encode_categories(store.list_categories())); });
  });
  http.Get(R"(/api/media/(\d+)/(\d+))", bind(&Impl::handle_media_get));
  http.Get("/feed.xml", bind(&Impl::handle_feed));
  http.Post(R"(/api/admin/message/(\d+)/status)", bind(&Impl::handle_set_status));
  http.Delete(R"(/api/admin/message/(\d+))", bind(&Impl::handle_delete));

  if (config.admin_ui_dir) http.set_mount_point("/admin", config.admin_ui_dir->string());
}

void NewsServer::Impl::handle_register(const Request& req, Response& res) {
  const auto first = req.get_param_value("first_name");
  const auto last = req.get_param_value("last_name");
  const auto username = req.get_param_value("username");
  const auto password = req.get_param_value("password");
  const auto check = validate_registration(first, last, username, password);
  if (!check.ok()) {
    send_error(res, 422, "registration failed", check.errors);
    return;
  }
  store.create_user(first, last, username, password);
  send_status(res, 200, StatusPayload::ok("registration successful"));
}

void NewsServer::Impl::handle_login(const Request& req, Response& res) {
  const auto session =
      store.authenticate(req.get_param_value("username"), req.get_param_value("password"));
  send_xml(res, 200, wire::encode_session(session.token));
}

void NewsServer::Impl::handle_create(const Request& req, Response& res) {
  const auto user = require_user(req, res);
  if (!user) return;
  const MessageFields fields{req.get_param_value("title"), req.get_param_value("body"),
                             req.get_param_value("place"), req.get_param_value("category")};
  const MessageId id = store.insert_message(fields, *user);
  send_xml(res, 200, wire::encode_created(id.value));
}

void NewsServer::Impl::handle_update(const Request& req, Response& res) {
  if (!require_user(req, res)) return;
  const auto id = parse_id(req.matches[1].str());
  if (!id) {
    send_error(res, 404, "no such message");
    return;
  }
  MessagePatch patch{param(req, "title"), param(req, "body"), param(req, "place"),
                     param(req, "category")};
  if (patch.empty()) {
    send_error(res, 422, "nothing to update");
    return;
  }
  store.update_message(MessageId{*id}, patch);
  send_status(res, 200, StatusPayload::ok("message updated"));
}

void NewsServer::Impl::handle_media_upload(const Request& req, Response& res,
                                           const httplib::ContentReader& reader) {
  if (!require_user(req, res)) return;
  const auto boundary = wire::boundary_from_content_type(req.get_header_value("Content-Type"));
  if (!boundary) {
    send_error(res, 400, "expected multipart/form-data with a boundary");
    return;
  }
  // httplib decodes multipart bodies itself when the request says so; relabel
  // the request so the raw bytes reach the wire decoder instead.
  auto& relabeled = const_cast<Request&>(req);
  relabeled.headers.erase("Content-Type");
  relabeled.headers.emplace("Content-Type", "application/octet-stream");

  const std::uint64_t limit = config.max_upload_bytes + kMultipartOverhead;
  std::string body;
  bool too_large = false;
  const bool read_ok = reader([&](const char* data, std::size_t n) {
    if (body.size() + n > limit) {
      too_large = true;
      return false;
    }
    body.append(data, n);
    return true;
  });
  if (too_large) {
    res.set_header("Connection", "close");
    send_error(res, 413, "request body too large");
    return;
  }
  if (!read_ok) {
    send_error(res, res.status == 413 ? 413 : 400, "could not read request body");
    return;
  }

  const auto parts = wire::decode_multipart(*boundary, body);
  const auto* id_part = find_part(parts, "message_id");
  const auto* kind_part = find_part(parts, "kind");
  const auto* file = find_part(parts, "file");
  std::vector<FieldError> missing;
  if (!id_part) missing.push_back({"message_id", "required"});
  if (!kind_part) missing.push_back({"kind", "required"});
  if (!file) missing.push_back({"file", "required"});
  if (!missing.empty()) {
    send_error(res, 422, "incomplete media upload", missing);
    return;
  }
  const auto id = parse_id(id_part->data);
  const auto kind = parse_media_kind(kind_part->data);
  if (!kind) {
    send_error(res, 422, "unknown media kind", {{"kind", "image, audio or video"}});
    return;
  }
  if (!id) {
    send_error(res, 404, "no such message");
    return;
  }
  if (file->data.size() > config.max_upload_bytes) {
    send_error(res, 413, "media larger than " + std::to_string(config.max_upload_bytes) + " bytes");
    return;
  }
  store.get_message(MessageId{*id});  // 404 before 415
  const MediaId media = store.attach_media(MessageId{*id}, *kind, upload_format(*file), file->data);
  send_xml(res, 200, wire::encode_created(media.value));
}

void NewsServer::Impl::handle_search(const Request& req, Response& res) {
  if (!require_user(req, res)) return;
  const auto keyword = req.get_param_value("q");
  if (keyword.empty()) {
    send_error(res, 400, "q must not be empty");
    return;
  }
  const auto field = parse_search_field(req.has_param("field") ? req.get_param_value("field")
                                                                : "title");
  if (!field) {
    send_error(res, 400, "field must be title, body or author");
    return;
  }
  std::size_t page = 1;
  if (req.has_param("page")) {
    const auto n = parse_id(req.get_param_value("page"));
    if (!n) {
      send_error(res, 400, "page must be a positive integer");
      return;
    }
    page = static_cast<std::size_t>(*n);
  }

  const auto matches = store.search(keyword, *field);
  std::vector<MessageId> ids;
  ids.reserve(matches.size());
  for (const auto& m : matches) ids.push_back(m.id);
  const PageSlice slice = paginate(ids, page);

  ResultPage result{slice.page, slice.total_matches, slice.has_more, {}};
  const std::size_t first = (page - 1) * kPageSize;
  for (std::size_t i = 0; i < slice.ids.size(); ++i) {
    result.items.push_back(summarize(matches[first + i]));
  }
  send_xml(res, 200, wire::encode_result_page(result));
}

void NewsServer::Impl::handle_list(const Request& req, Response& res) {
  const auto messages = req.has_param("category")
                            ? store.list_by_category(req.get_param_value("category"))
                            : store.list_recent();
  std::vector<NewsItem> items;
  items.reserve(messages.size());
  for (const auto& m : messages) items.push_back(summarize(m));
  send_xml(res, 200, wire::encode_news_list(items));
}

void NewsServer::Impl::handle_get(const Request& req, Response& res) {
  const auto id = parse_id(req.matches[1].str());
  if (!id) {
    send_error(res, 404, "no such message");
    return;
  }
  const Message m = store.get_message(MessageId{*id});
  if (m.status != MessageStatus::active && !viewer_is_admin(req)) {
    send_error(res, 404, "no message " + std::to_string(*id));
    return;
  }
  send_xml(res, 200, wire::encode_news(summarize(m, true)));
}

void NewsServer::Impl::handle_media_get(const Request& req, Response& res) {
  const auto message_id = parse_id(req.matches[1].str());
  const auto media_id = parse_id(req.matches[2].str());
  if (!message_id || !media_id) {
    send_error(res, 404, "no such media");
    return;
  }
  const Message m = store.get_message(MessageId{*message_id});
  if (m.status != MessageStatus::active && !viewer_is_admin(req)) {
    send_error(res, 404, "no such media");
    return;
  }
  auto [meta, bytes] = store.read_media(MessageId{*message_id}, MediaId{*media_id});
  res.status = 200;
  res.set_content(std::move(bytes), mime_type(meta));
}

void NewsServer::Impl::handle_feed(const Request&, Response& res) {
  const wire::FeedInfo info{config.site_title, config.site_link, config.site_description};
  const auto messages = store.list_recent();
  res.status = 200;
  res.set_content(wire::encode_rss(info, messages), std::string(kRssType));
}

void NewsServer::Impl::handle_set_status(const Request& req, Response& res) {
  if (!require_admin(req, res)) return;
  const auto id = parse_id(req.matches[1].str());
  if (!id) {
    send_error(res, 404, "no such message");
    return;
  }
  const auto status = parse_status(req.get_param_value("status"));
  if (!status) {
    send_error(res, 400, "status must be active or inactive");
    return;
  }
  store.set_status(MessageId{*id}, *status);
  send_status(res, 200, StatusPayload::ok("message " + std::string(to_string(*status))));
}

void NewsServer::Impl::handle_delete(const Request& req, Response& res) {
  if (!require_admin(req, res)) return;
  const auto id = parse_id(req.matches[1].str());
  if (!id) {
    send_error(res, 404, "no such message");
    return;
  }
  store.delete_message(MessageId{*id});
  send_status(res, 200, StatusPayload::ok("message deleted"));
}

NewsServer::NewsServer(ServerConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  impl_->install_routes();
}

NewsServer::~NewsServer() { stop(); }

int NewsServer::bind() {
  const auto& c = impl_->config;
  if (c.port == 0) {
    impl_->port = impl_->http.bind_to_any_port(c.host);
  } else {
    impl_->port = impl_->http.bind_to_port(c.host, c.port) ? c.port : -1;
  }
  if (impl_->port < 0) {
    throw std::runtime_error("cannot bind " + c.host + ":" + std::to_string(c.port));
  }
  return impl_->port;
}

void NewsServer::run() {
  if (impl_->port < 0) bind();
  impl_->http.listen_after_bind();
}

void NewsServer::stop() {
  if (impl_) impl_->http.stop();
}

void NewsServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

int NewsServer::port() const { return impl_->port; }

const ServerConfig& NewsServer::config() const { return impl_->config; }

store::Store& NewsServer::store() { return impl_->store; }

void NewsServer::set_log_sink(LogSink sink) {
  std::lock_guard lock(impl_->log_mutex);
  impl_->log_sink = std::move(sink);
}

}  // namespace newsroom::server
