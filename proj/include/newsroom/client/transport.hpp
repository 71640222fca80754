#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "newsroom/client/config.hpp"
#include "newsroom/core/model.hpp"
#include "newsroom/wire/status.hpp"

namespace newsroom::client {

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string content_type;
};

using FormFields = std::vector<std::pair<std::string, std::string>>;
/// Bytes of the request body written so far, and the body's total size.
using SendProgress = std::function<void(std::uint64_t sent, std::uint64_t total)>;

/// Plain HTTP/1.1 to one server. Failures to connect or to complete an
/// exchange throw ClientError(network).
class Transport {
 public:
  explicit Transport(ServerUrl url);
  ~Transport();

  Transport(Transport&&) noexcept;
  Transport& operator=(Transport&&) noexcept;

  static constexpr std::size_t kChunkBytes = 8 * 1024;

  HttpResponse get(std::string_view path, const FormFields& query, const std::string* token);
  HttpResponse post_form(std::string_view path, const FormFields& fields,
                         const std::string* token);
  /// Streams `body` in kChunkBytes pieces, reporting after each.
  HttpResponse post_body(std::string_view path, std::string_view content_type,
                         std::string_view body, const std::string* token,
                         const SendProgress& progress);
  HttpResponse del(std::string_view path, const std::string* token);

  const ServerUrl& url() const { return url_; }

 private:
  struct Impl;
  ServerUrl url_;
  std::unique_ptr<Impl> impl_;
};

/// Typed calls over the server's API. Holds the session token; calls that
/// need one log in on demand and retry once after a 401.
class ApiClient {
 public:
  explicit ApiClient(ClientConfig config, std::optional<std::string> token = std::nullopt);

  /// Called whenever login issues a new token.
  std::function<void(const std::string&)> on_token;

  std::string login();
  const std::optional<std::string>& token() const { return token_; }

  wire::StatusPayload register_user(std::string_view first_name, std::string_view last_name);

  MessageId create_message(const MessageFields& fields);
  wire::StatusPayload update_message(MessageId id, const MessagePatch& patch);
  MediaId upload_media(MessageId message_id, MediaKind kind, std::string_view filename,
                       std::string_view bytes, const SendProgress& progress = {});
  ResultPage search(std::string_view keyword, SearchField field, std::size_t page);

  // Public reads; these never send the session token.
  std::vector<std::string> categories();
  std::vector<NewsItem> list_messages(const std::optional<std::string>& category = std::nullopt);
  NewsItem get_message(MessageId id);
  std::string fetch_media(MessageId message_id, MediaId media_id);
  std::string feed_xml();

  wire::StatusPayload set_status(MessageId id, MessageStatus status);
  wire::StatusPayload delete_message(MessageId id);

  /// Request bytes of the text POST for `fields`, for progress accounting.
  static std::uint64_t text_request_bytes(const MessageFields& fields);

  const ClientConfig& config() const { return config_; }
  Transport& transport() { return transport_; }

 private:
  template <class Fn>
  HttpResponse authed(Fn&& send);
  const std::string& ensure_token();

  ClientConfig config_;
  Transport transport_;
  std::optional<std::string> token_;
};

/// Converts a non-2xx response into ClientError, decoding the status body.
[[noreturn]] void raise_for(const HttpResponse& res);

}  // namespace newsroom::client
