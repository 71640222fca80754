#include "newsroom/client/reporter.hpp"

#include <algorithm>
#include <sstream>

#include "newsroom/core/text.hpp"

namespace newsroom::client {
namespace {

namespace fs = std::filesystem;
using K = ClientError::Kind;

/// Folds byte counts into a 0..99 percentage and forwards only increases;
/// 100 is sent separately by finish().
class ProgressMeter {
 public:
  ProgressMeter(const ProgressCallback& cb, std::uint64_t total) : cb_(cb), total_(total) {}

  void report(std::uint64_t done) {
    const int pct = total_ == 0 ? 99 : static_cast<int>(99 * std::min(done, total_) / total_);
    if (pct > last_) {
      last_ = pct;
      if (cb_) cb_(pct);
    }
  }

  void finish() {
    last_ = 100;
    if (cb_) cb_(100);
  }

 private:
  const ProgressCallback& cb_;
  std::uint64_t total_;
  int last_ = -1;
};

std::string attachments_line(std::size_t n) {
  if (n == 0) return "no attachments";
  return std::to_string(n) + (n == 1 ? " attachment" : " attachments");
}

}  // namespace

MessageId upload_draft(DraftStore& drafts, std::string_view draft_id, ApiClient& api,
                       const ProgressCallback& progress) {
  Draft d = drafts.get(draft_id);
  if (d.state.phase == UploadPhase::complete) {
    throw ClientError(K::validation, "draft " + d.id + " is already uploaded as message " +
                                         std::to_string(d.state.message_id->value));
  }

  // Keep a copy of every attachment with the saved item before sending.
  std::vector<std::uint64_t> sizes;
  for (std::size_t i = 0; i < d.attachments.size(); ++i) {
    const fs::path copy = drafts.retained_copy(d, i);
    if (!fs::exists(copy)) {
      const auto& src = d.attachments[i].source;
      if (!fs::is_regular_file(src)) {
        throw ClientError(K::file_not_found, "attachment " + std::to_string(i + 1) +
                                                 " is gone: " + src.string());
      }
      fs::create_directories(copy.parent_path());
      fs::path tmp = copy;
      tmp += ".tmp";
      fs::copy_file(src, tmp, fs::copy_options::overwrite_existing);
      fs::rename(tmp, copy);
    }
    sizes.push_back(fs::file_size(copy));
  }

  const std::uint64_t text_bytes = ApiClient::text_request_bytes(d.fields);
  std::uint64_t total = text_bytes;
  for (auto s : sizes) total += s;
  std::uint64_t done = 0;
  if (d.state.phase != UploadPhase::unsent) done += text_bytes;
  for (std::size_t i = 0; i < d.media_sent(); ++i) done += sizes[i];

  ProgressMeter meter(progress, total);
  meter.report(done);

  if (d.state.phase == UploadPhase::unsent) {
    MessageId id;
    try {
      id = api.create_message(d.fields);
    } catch (const ClientError& e) {
      if (e.kind() == K::auth) throw;
      ClientError err(K::text_upload_failed, "message text was not uploaded: " + std::string(e.what()),
                      e.fields());
      err.http_status = e.http_status;
      throw err;
    }
    d.state.phase = UploadPhase::text_sent;
    d.state.message_id = id;
    drafts.save(d);
    done += text_bytes;
    meter.report(done);
  }

  const MessageId message_id = *d.state.message_id;
  for (std::size_t i = d.media_sent(); i < d.attachments.size(); ++i) {
    const auto bytes = detail::slurp(drafts.retained_copy(d, i));
    if (!bytes) {
      ClientError err(K::media_upload_failed, "cannot read the saved copy of attachment " +
                                                  std::to_string(i + 1));
      err.media_index = i;
      throw err;
    }
    const auto& a = d.attachments[i];
    std::string filename = a.source.filename().string();
    if (normalize_format(a.source.extension().string()) != a.format) {
      filename = std::to_string(i) + "." + a.format;
    }
    const std::uint64_t size = sizes[i];
    MediaId media;
    try {
      media = api.upload_media(message_id, a.kind, filename, *bytes,
                               [&](std::uint64_t sent, std::uint64_t body_total) {
                                 // Scale multipart framing out of the count.
                                 meter.report(done + size * sent / std::max<std::uint64_t>(body_total, 1));
                               });
    } catch (const ClientError& e) {
      if (e.kind() == K::auth) throw;
      ClientError err(K::media_upload_failed, "attachment " + std::to_string(i + 1) + " of " +
                                                  std::to_string(d.attachments.size()) +
                                                  " was not uploaded: " + e.what(),
                      e.fields());
      err.media_index = i;
      err.http_status = e.http_status;
      throw err;
    }
    d.state.media_ids.push_back(media);
    drafts.save(d);
    done += size;
    meter.report(done);
  }

  d.state.phase = UploadPhase::complete;
  drafts.save(d);
  meter.finish();
  return message_id;
}

Pager::Pager(ApiClient& api, std::string keyword, SearchField field)
    : api_(api), keyword_(std::move(keyword)), field_(field) {
  page_ = api_.search(keyword_, field_, 1);
}

const ResultPage& Pager::next() {
  if (!page_.has_more) {
    throw ClientError(K::no_more_pages, "no more results after page " + std::to_string(page_.page));
  }
  page_ = api_.search(keyword_, field_, page_.page + 1);
  return page_;
}

std::vector<std::string> read_feed(ApiClient& api) {
  auto names = api.categories();
  std::stable_sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
    return text::compare_folded(a, b) < 0;
  });
  return names;
}

std::vector<NewsItem> read_category(ApiClient& api, std::string_view name) {
  try {
    return api.list_messages(std::string(name));
  } catch (const ClientError& e) {
    if (e.kind() != K::not_found) throw;
    throw ClientError(K::unknown_category, e.what());
  }
}

NewsItem read_message(ApiClient& api, MessageId id) {
  NewsItem item = api.get_message(id);
  item.media.clear();
  return item;
}

std::string render_summary_line(const NewsItem& item) {
  std::ostringstream out;
  out << '#' << item.id.value << "  " << item.title << "  [" << item.category << ", "
      << item.author << ", " << format_rfc3339(item.created_at) << ']';
  if (item.status != MessageStatus::active) out << " (" << to_string(item.status) << ')';
  return std::move(out).str();
}

std::string render_message(const NewsItem& item) {
  std::ostringstream out;
  out << item.title << '\n'
      << "by " << item.author;
  if (!item.place.empty()) out << " in " << item.place;
  out << " | " << item.category << " | " << format_rfc3339(item.created_at) << '\n';
  if (item.status != MessageStatus::active) out << "status: " << to_string(item.status) << '\n';
  out << '\n' << item.body << "\n\n" << attachments_line(item.media_count) << '\n';
  return std::move(out).str();
}

std::string render_page(const ResultPage& page) {
  std::ostringstream out;
  if (page.total_matches == 0) return "no results\n";
  const std::size_t first = (page.page - 1) * kPageSize + 1;
  out << "page " << page.page << ": results " << first << '-'
      << first + page.items.size() - (page.items.empty() ? 0 : 1) << " of "
      << page.total_matches << '\n';
  for (const auto& item : page.items) out << "  " << render_summary_line(item) << '\n';
  return std::move(out).str();
}

std::string render_draft(const Draft& d) {
  std::ostringstream out;
  out << d.id << "  " << to_string(d.state.phase);
  if (d.state.message_id) out << " #" << d.state.message_id->value;
  out << "  " << d.fields.title << "  (" << attachments_line(d.attachments.size());
  if (d.state.phase == UploadPhase::text_sent) {
    out << ", " << d.media_sent() << " sent";
  }
  out << ')';
  return std::move(out).str();
}

Reporter::Reporter(fs::path data_dir) : config_(data_dir), drafts_(data_dir / "saved") {}

ApiClient Reporter::api() {
  ApiClient client(config_.require(), config_.cached_token());
  client.on_token = [this](const std::string& token) { config_.save_token(token); };
  return client;
}

}  // namespace newsroom::client
