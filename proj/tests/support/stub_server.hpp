#pragma once
// A recording stand-in for the news server: accepts login, message and
// media requests, logs each one in arrival order, and fails on request.

#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "newsroom/wire/news_xml.hpp"
#include "newsroom/wire/status.hpp"

namespace testkit {

struct RecordedRequest {
  std::string method;
  std::string path;
  std::string token;
  std::string title;      // message requests
  std::string file_data;  // media requests
  std::string filename;
  std::string kind;
  std::string message_id;
};

class StubServer {
 public:
  StubServer() {
    using httplib::Request;
    using httplib::Response;
    http_.Post("/api/login", [this](const Request& req, Response& res) {
      record(req);
      std::lock_guard lock(mutex_);
      const std::string n = std::to_string(++logins_);
      token_ = std::string(64 - n.size(), 'a') + n;
      res.set_content(newsroom::wire::encode_session(token_), "application/xml");
    });
    http_.Post("/api/message", [this](const Request& req, Response& res) {
      const auto r = record(req);
      std::lock_guard lock(mutex_);
      if (!authorized(r, res)) return;
      if (fail_text_) {
        fail(res);
        return;
      }
      res.set_content(newsroom::wire::encode_created(++next_message_), "application/xml");
    });
    http_.Post("/api/media", [this](const Request& req, Response& res) {
      const auto r = record(req);
      std::lock_guard lock(mutex_);
      if (!authorized(r, res)) return;
      const std::size_t index = media_seen_++;
      if (fail_media_at_ && *fail_media_at_ == index) {
        fail(res);
        return;
      }
      res.set_content(newsroom::wire::encode_created(++next_media_), "application/xml");
    });
    http_.set_tcp_nodelay(true);
    port_ = http_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { http_.listen_after_bind(); });
    http_.wait_until_ready();
  }

  ~StubServer() {
    http_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  /// Every /api/message request fails with 500 while set.
  void fail_text(bool on) {
    std::lock_guard lock(mutex_);
    fail_text_ = on;
  }
  /// The media request with this zero-based arrival index fails with 500.
  void fail_media_at(std::optional<std::size_t> index) {
    std::lock_guard lock(mutex_);
    fail_media_at_ = index;
    media_seen_ = 0;
  }
  /// Forget the current token so the next authenticated call gets 401.
  void expire_sessions() {
    std::lock_guard lock(mutex_);
    token_.clear();
  }

  std::vector<RecordedRequest> requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
  }
  std::vector<RecordedRequest> requests_to(std::string_view path) const {
    std::vector<RecordedRequest> out;
    for (auto& r : requests())
      if (r.path == path) out.push_back(r);
    return out;
  }
  void clear() {
    std::lock_guard lock(mutex_);
    requests_.clear();
  }

 private:
  RecordedRequest record(const httplib::Request& req) {
    RecordedRequest r;
    r.method = req.method;
    r.path = req.path;
    r.token = req.get_header_value("X-Auth-Token");
    if (r.token.empty()) r.token = req.get_param_value("token");
    r.title = req.get_param_value("title");
    if (req.has_file("file")) {
      const auto f = req.get_file_value("file");
      r.file_data = f.content;
      r.filename = f.filename;
      r.kind = req.get_file_value("kind").content;
      r.message_id = req.get_file_value("message_id").content;
    }
    std::lock_guard lock(mutex_);
    requests_.push_back(r);
    return r;
  }

  bool authorized(const RecordedRequest& r, httplib::Response& res) const {
    if (!token_.empty() && r.token == token_) return true;
    res.status = 401;
    res.set_content(newsroom::wire::encode_status(newsroom::wire::StatusPayload::error("login required")),
                    "application/xml");
    return false;
  }

  static void fail(httplib::Response& res) {
    res.status = 500;
    res.set_content(newsroom::wire::encode_status(newsroom::wire::StatusPayload::error("injected")),
                    "application/xml");
  }

  httplib::Server http_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mutex_;
  std::vector<RecordedRequest> requests_;
  std::string token_;
  int logins_ = 0;
  bool fail_text_ = false;
  std::optional<std::size_t> fail_media_at_;
  std::size_t media_seen_ = 0;
  std::int64_t next_message_ = 0;
  std::int64_t next_media_ = 0;
};

}  // namespace testkit
