#include "newsroom/client/transport.hpp"

#include <algorithm>

#include "httplib.h"
#include "newsroom/wire/multipart.hpp"
#include "newsroom/wire/news_xml.hpp"
#include "newsroom/xml/event.hpp"

namespace newsroom::client {
namespace {

using K = ClientError::Kind;

httplib::Params to_params(const FormFields& fields) {
  httplib::Params p;
  for (const auto& [k, v] : fields) p.emplace(k, v);
  return p;
}

httplib::Headers auth_headers(const std::string* token) {
  httplib::Headers h;
  if (token) h.emplace("X-Auth-Token", *token);
  return h;
}

std::string id_path(std::string_view prefix, std::int64_t id, std::string_view suffix = {}) {
  return std::string(prefix) + std::to_string(id) + std::string(suffix);
}

/// Runs a decoder, turning wire-level failures into ClientError(protocol).
template <class Fn>
auto decoded(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const wire::ProtocolError& e) {
    throw ClientError(K::protocol, std::string("malformed response: ") + e.what());
  } catch (const xml::XmlError& e) {
    throw ClientError(K::protocol, std::string("malformed response: ") + e.what());
  }
}

void expect_ok(const HttpResponse& res) {
  if (res.status < 200 || res.status >= 300) raise_for(res);
}

}  // namespace

struct Transport::Impl {
  explicit Impl(const ServerUrl& url) : http(url.host, url.port) {
    http.set_connection_timeout(5, 0);
    http.set_read_timeout(60, 0);
    http.set_write_timeout(60, 0);
    http.set_keep_alive(true);
    http.set_tcp_nodelay(true);
  }

  HttpResponse finish(httplib::Result r, std::string_view what) {
    if (!r) {
      throw ClientError(K::network, std::string(what) + ": " + httplib::to_string(r.error()));
    }
    return {r->status, std::move(r->body), r->get_header_value("Content-Type")};
  }

  httplib::Client http;
};

Transport::Transport(ServerUrl url) : url_(std::move(url)), impl_(std::make_unique<Impl>(url_)) {}

Transport::~Transport() = default;
Transport::Transport(Transport&&) noexcept = default;
Transport& Transport::operator=(Transport&&) noexcept = default;

HttpResponse Transport::get(std::string_view path, const FormFields& query,
                            const std::string* token) {
  const std::string full = url_.base_path + std::string(path);
  return impl_->finish(impl_->http.Get(full, to_params(query), auth_headers(token)),
                       "GET " + full);
}

HttpResponse Transport::post_form(std::string_view path, const FormFields& fields,
                                  const std::string* token) {
  const std::string full = url_.base_path + std::string(path);
  return impl_->finish(impl_->http.Post(full, auth_headers(token), to_params(fields)),
                       "POST " + full);
}

HttpResponse Transport::post_body(std::string_view path, std::string_view content_type,
                                  std::string_view body, const std::string* token,
                                  const SendProgress& progress) {
  const std::string full = url_.base_path + std::string(path);
  const std::uint64_t total = body.size();
  auto provider = [&](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
    const std::size_t n = std::min({length, kChunkBytes, body.size() - offset});
    if (!sink.write(body.data() + offset, n)) return false;
    if (progress) progress(offset + n, total);
    return true;
  };
  return impl_->finish(impl_->http.Post(full, auth_headers(token), body.size(), provider,
                                        std::string(content_type)),
                       "POST " + full);
}

HttpResponse Transport::del(std::string_view path, const std::string* token) {
  const std::string full = url_.base_path + std::string(path);
  return impl_->finish(impl_->http.Delete(full, auth_headers(token)), "DELETE " + full);
}

void raise_for(const HttpResponse& res) {
  wire::StatusPayload payload;
  try {
    payload = wire::decode_status(res.body);
  } catch (const std::exception& e) {
    ClientError err(K::protocol, "HTTP " + std::to_string(res.status) +
                                     " with an unreadable body: " + e.what());
    err.http_status = res.status;
    throw err;
  }
  K kind = K::protocol;
  switch (res.status) {
    case 401:
    case 403: kind = K::auth; break;
    case 404: kind = K::not_found; break;
    case 415: kind = K::format_mismatch; break;
    case 400:
    case 409:
    case 413:
    case 422: kind = K::validation; break;
    default:
      if (res.status >= 500) kind = K::server;
  }
  std::string message = payload.message;
  for (const auto& f : payload.detail) message += "\n  " + f.field + ": " + f.reason;
  ClientError err(kind, message, payload.detail);
  err.http_status = res.status;
  throw err;
}

ApiClient::ApiClient(ClientConfig config, std::optional<std::string> token)
    : config_(std::move(config)), transport_(config_.url()), token_(std::move(token)) {}

std::string ApiClient::login() {
  const auto res = transport_.post_form(
      "/api/login", {{"username", config_.username}, {"password", config_.password}}, nullptr);
  expect_ok(res);
  token_ = decoded([&] { return wire::decode_session(res.body); });
  if (on_token) on_token(*token_);
  return *token_;
}

const std::string& ApiClient::ensure_token() {
  if (!token_) login();
  return *token_;
}

template <class Fn>
HttpResponse ApiClient::authed(Fn&& send) {
  const bool had_token = token_.has_value();
  HttpResponse res = send(&ensure_token());
  if (res.status == 401 && had_token) {
    // The cached token may have expired; one fresh login, then give up.
    token_.reset();
    res = send(&ensure_token());
  }
  expect_ok(res);
  return res;
}

wire::StatusPayload ApiClient::register_user(std::string_view first_name,
                                             std::string_view last_name) {
  const auto res = transport_.post_form("/api/register",
                                        {{"first_name", std::string(first_name)},
                                         {"last_name", std::string(last_name)},
                                         {"username", config_.username},
                                         {"password", config_.password}},
                                        nullptr);
  expect_ok(res);
  return decoded([&] { return wire::decode_status(res.body); });
}

MessageId ApiClient::create_message(const MessageFields& f) {
  const FormFields fields{
      {"title", f.title}, {"body", f.body}, {"place", f.place}, {"category", f.category}};
  const auto res =
      authed([&](const std::string* t) { return transport_.post_form("/api/message", fields, t); });
  return MessageId{decoded([&] { return wire::decode_created(res.body); })};
}

std::uint64_t ApiClient::text_request_bytes(const MessageFields& f) {
  httplib::Params p{
      {"title", f.title}, {"body", f.body}, {"place", f.place}, {"category", f.category}};
  return httplib::detail::params_to_query_str(p).size();
}

wire::StatusPayload ApiClient::update_message(MessageId id, const MessagePatch& patch) {
  FormFields fields;
  if (patch.title) fields.emplace_back("title", *patch.title);
  if (patch.body) fields.emplace_back("body", *patch.body);
  if (patch.place) fields.emplace_back("place", *patch.place);
  if (patch.category) fields.emplace_back("category", *patch.category);
  const auto path = id_path("/api/message/", id.value, "/update");
  const auto res =
      authed([&](const std::string* t) { return transport_.post_form(path, fields, t); });
  return decoded([&] { return wire::decode_status(res.body); });
}

MediaId ApiClient::upload_media(MessageId message_id, MediaKind kind, std::string_view filename,
                                std::string_view bytes, const SendProgress& progress) {
  const auto ext = filename.substr(filename.rfind('.') + 1);
  const std::string format = normalize_format(ext);
  const std::string mime = format == "jpeg"  ? "image/jpeg"
                           : format == "mp3" ? "audio/mpeg"
                                             : std::string(to_string(kind)) + "/" + format;
  const auto encoded = wire::encode_multipart({
      {"message_id", std::nullopt, std::nullopt, std::to_string(message_id.value)},
      {"kind", std::nullopt, std::nullopt, std::string(to_string(kind))},
      {"file", std::string(filename), mime, std::string(bytes)},
  });
  const auto res = authed([&](const std::string* t) {
    return transport_.post_body("/api/media", encoded.content_type(), encoded.body, t, progress);
  });
  return MediaId{decoded([&] { return wire::decode_created(res.body); })};
}

ResultPage ApiClient::search(std::string_view keyword, SearchField field, std::size_t page) {
  const FormFields query{{"q", std::string(keyword)},
                         {"field", std::string(to_string(field))},
                         {"page", std::to_string(page)}};
  const auto res =
      authed([&](const std::string* t) { return transport_.get("/api/search", query, t); });
  return decoded([&] { return wire::decode_result_page(res.body); });
}

std::vector<std::string> ApiClient::categories() {
  const auto res = transport_.get("/api/categories", {}, nullptr);
  expect_ok(res);
  return decoded([&] { return wire::decode_categories(res.body); });
}

std::vector<NewsItem> ApiClient::list_messages(const std::optional<std::string>& category) {
  FormFields query;
  if (category) query.emplace_back("category", *category);
  const auto res = transport_.get("/api/messages", query, nullptr);
  expect_ok(res);
  return decoded([&] { return wire::decode_result_page(res.body).items; });
}

NewsItem ApiClient::get_message(MessageId id) {
  const auto res = transport_.get(id_path("/api/message/", id.value), {}, nullptr);
  expect_ok(res);
  return decoded([&] { return wire::decode_news(res.body); });
}

std::string ApiClient::fetch_media(MessageId message_id, MediaId media_id) {
  const auto res = transport_.get(
      id_path("/api/media/", message_id.value, "/" + std::to_string(media_id.value)), {},
      nullptr);
  expect_ok(res);
  return res.body;
}

std::string ApiClient::feed_xml() {
  const auto res = transport_.get("/feed.xml", {}, nullptr);
  expect_ok(res);
  return res.body;
}

wire::StatusPayload ApiClient::set_status(MessageId id, MessageStatus status) {
  const auto path = id_path("/api/admin/message/", id.value, "/status");
  const FormFields fields{{"status", std::string(to_string(status))}};
  const auto res =
      authed([&](const std::string* t) { return transport_.post_form(path, fields, t); });
  return decoded([&] { return wire::decode_status(res.body); });
}

wire::StatusPayload ApiClient::delete_message(MessageId id) {
  const auto path = id_path("/api/admin/message/", id.value);
  const auto res = authed([&](const std::string* t) { return transport_.del(path, t); });
  return decoded([&] { return wire::decode_status(res.body); });
}

}  // namespace newsroom::client
