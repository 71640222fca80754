#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "newsroom/client/config.hpp"
#include "newsroom/client/drafts.hpp"
#include "newsroom/client/transport.hpp"

namespace newsroom::client {

/// Percent complete, 0..100. Values never decrease and 100 arrives exactly
/// once, after the last byte has been sent and acknowledged.
using ProgressCallback = std::function<void(int percent)>;

/// Uploads a draft: the message text first, then each attachment in order.
/// State is saved after every accepted request, so a failed run can be
/// repeated and sends only what the server has not yet acknowledged.
///
/// Throws text_upload_failed (nothing sent), media_upload_failed with
/// media_index set, or auth when login is refused.
MessageId upload_draft(DraftStore& drafts, std::string_view draft_id, ApiClient& api,
                       const ProgressCallback& progress = {});

/// Search results one page at a time. Construction fetches page 1; next()
/// is only allowed while the current page reports more.
class Pager {
 public:
  Pager(ApiClient& api, std::string keyword, SearchField field);

  const ResultPage& current() const { return page_; }
  bool has_next() const { return page_.has_more; }
  /// Throws no_more_pages without contacting the server when !has_next().
  const ResultPage& next();

 private:
  ApiClient& api_;
  std::string keyword_;
  SearchField field_;
  ResultPage page_;
};

/// Feed drill-down: categories, then titles in one category, then one
/// message's text.
std::vector<std::string> read_feed(ApiClient& api);
/// Throws unknown_category.
std::vector<NewsItem> read_category(ApiClient& api, std::string_view name);
NewsItem read_message(ApiClient& api, MessageId id);

std::string render_summary_line(const NewsItem& item);
/// Full text with attachments shown only as a count.
std::string render_message(const NewsItem& item);
std::string render_page(const ResultPage& page);
std::string render_draft(const Draft& draft);

/// Config, cached token and saved items rooted at one data directory.
class Reporter {
 public:
  explicit Reporter(std::filesystem::path data_dir);

  ConfigStore& config() { return config_; }
  DraftStore& drafts() { return drafts_; }
  /// A client for the configured server that persists any new token.
  ApiClient api();

 private:
  ConfigStore config_;
  DraftStore drafts_;
};

}  // namespace newsroom::client
