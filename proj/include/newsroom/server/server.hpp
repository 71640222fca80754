#pragma once

#include <functional>
#include <memory>
#include <string_view>

#include "newsroom/server/config.hpp"
#include "newsroom/store/store.hpp"

namespace newsroom::server {

/// HTTP service binding the wire protocol to a Store.
///
///   POST   /api/register                      form: first_name last_name username password
///   POST   /api/login                         form: username password
///   POST   /api/message                       auth; form: title body place category
///   POST   /api/message/{id}/update           auth; any of title body place category
///   POST   /api/media                         auth; multipart: message_id kind file
///   GET    /api/search?q=&field=&page=        auth
///   GET    /api/messages[?category=]          public viewer list
///   GET    /api/message/{id}                  public (admins also see inactive)
///   GET    /api/categories                    public
///   GET    /api/media/{message_id}/{media_id} public raw blob
///   GET    /feed.xml                          public RSS 2.0
///   POST   /api/admin/message/{id}/status     admin; form: status
///   DELETE /api/admin/message/{id}            admin
///
/// The session token travels in X-Auth-Token or as a `token` form field.
/// Every error body is a <status> document.
class NewsServer {
 public:
  using LogSink = std::function<void(std::string_view line)>;

  explicit NewsServer(ServerConfig config);
  ~NewsServer();

  NewsServer(const NewsServer&) = delete;
  NewsServer& operator=(const NewsServer&) = delete;

  /// Binds the configured address; returns the bound port (useful with
  /// port 0). Throws std::runtime_error if the port is unavailable.
  int bind();
  /// Serves until stop(); call bind() first.
  void run();
  /// Safe from any thread.
  void stop();
  void wait_until_ready() const;

  int port() const;
  const ServerConfig& config() const;
  store::Store& store();

  /// One line per request: method, path, status, milliseconds. Defaults to
  /// standard output.
  void set_log_sink(LogSink sink);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace newsroom::server
