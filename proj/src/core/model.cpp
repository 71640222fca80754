#include "newsroom/core/model.hpp"

#include <algorithm>
#include <stdexcept>

#include "newsroom/core/text.hpp"

namespace newsroom {
namespace {

bool valid_username(std::string_view u) {
  if (u.size() < 3 || u.size() > kMaxUsernameChars) return false;
  return std::all_of(u.begin(), u.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

void check_utf8(std::string_view field, std::string_view value, ValidationResult& r) {
  if (!text::is_valid_utf8(value)) r.errors.push_back({std::string(field), "not valid UTF-8"});
}

void check_title(std::string_view title, ValidationResult& r) {
  if (!text::is_valid_utf8(title)) {
    r.errors.push_back({"title", "not valid UTF-8"});
  } else if (title.empty()) {
    r.errors.push_back({"title", "required"});
  } else if (text::code_point_count(title) > kMaxTitleChars) {
    r.errors.push_back({"title", "longer than 256 characters"});
  }
}

}  // namespace

std::string_view to_string(MessageStatus s) {
  return s == MessageStatus::active ? "active" : "inactive";
}

std::string_view to_string(MediaKind k) {
  switch (k) {
    case MediaKind::image: return "image";
    case MediaKind::audio: return "audio";
    case MediaKind::video: return "video";
  }
  return "image";
}

std::string_view to_string(SearchField f) {
  switch (f) {
    case SearchField::title: return "title";
    case SearchField::body: return "body";
    case SearchField::author: return "author";
  }
  return "title";
}

std::optional<MessageStatus> parse_status(std::string_view s) {
  if (s == "active") return MessageStatus::active;
  if (s == "inactive") return MessageStatus::inactive;
  return std::nullopt;
}

std::optional<MediaKind> parse_media_kind(std::string_view s) {
  if (s == "image") return MediaKind::image;
  if (s == "audio") return MediaKind::audio;
  if (s == "video") return MediaKind::video;
  return std::nullopt;
}

std::optional<SearchField> parse_search_field(std::string_view s) {
  if (s == "title") return SearchField::title;
  if (s == "body") return SearchField::body;
  if (s == "author") return SearchField::author;
  return std::nullopt;
}

bool ValidationResult::names(std::string_view field) const {
  return std::any_of(errors.begin(), errors.end(),
                     [&](const FieldError& e) { return e.field == field; });
}

ValidationResult validate_registration(std::string_view first_name, std::string_view last_name,
                                       std::string_view username, std::string_view password) {
  ValidationResult r;
  if (first_name.empty()) r.errors.push_back({"first_name", "required"});
  check_utf8("first_name", first_name, r);
  if (last_name.empty()) r.errors.push_back({"last_name", "required"});
  check_utf8("last_name", last_name, r);
  if (!valid_username(username)) {
    r.errors.push_back({"username", "3-64 characters from A-Z, a-z, 0-9 and _"});
  }
  if (text::code_point_count(password) < kMinPasswordChars) {
    r.errors.push_back({"password", "at least 6 characters"});
  } else {
    check_utf8("password", password, r);
  }
  return r;
}

ValidationResult validate_message(const MessageFields& fields) {
  ValidationResult r;
  check_title(fields.title, r);
  if (fields.body.empty()) r.errors.push_back({"body", "required"});
  check_utf8("body", fields.body, r);
  check_utf8("place", fields.place, r);
  if (fields.category.empty()) r.errors.push_back({"category", "required"});
  check_utf8("category", fields.category, r);
  return r;
}

ValidationResult validate_patch(const MessagePatch& patch) {
  ValidationResult r;
  if (patch.title) check_title(*patch.title, r);
  if (patch.body) {
    if (patch.body->empty()) r.errors.push_back({"body", "required"});
    check_utf8("body", *patch.body, r);
  }
  if (patch.place) check_utf8("place", *patch.place, r);
  if (patch.category) {
    if (patch.category->empty()) r.errors.push_back({"category", "required"});
    check_utf8("category", *patch.category, r);
  }
  return r;
}

std::string normalize_format(std::string_view extension_or_format) {
  std::string f;
  for (char c : extension_or_format) {
    f.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c + 0x20) : c);
  }
  if (!f.empty() && f.front() == '.') f.erase(0, 1);
  if (f == "jpg") return "jpeg";
  return f;
}

bool format_allowed(MediaKind kind, std::string_view format) {
  switch (kind) {
    case MediaKind::image: return format == "jpeg";
    case MediaKind::audio: return format == "mp3";
    case MediaKind::video:
      return !format.empty() && std::all_of(format.begin(), format.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
      });
  }
  return false;
}

bool message_matches(const Message& msg, std::string_view keyword, SearchField field) {
  switch (field) {
    case SearchField::title: return text::contains_folded(msg.title, keyword);
    case SearchField::body: return text::contains_folded(msg.body, keyword);
    case SearchField::author: return text::contains_folded(msg.author, keyword);
  }
  return false;
}

bool newer_first(const Message& a, const Message& b) {
  if (a.created_at != b.created_at) return a.created_at > b.created_at;
  return a.id > b.id;
}

std::vector<Message> viewer_order(std::span<const Message> messages) {
  std::vector<Message> out;
  for (const auto& m : messages) {
    if (m.status == MessageStatus::active) out.push_back(m);
  }
  std::sort(out.begin(), out.end(), newer_first);
  return out;
}

std::optional<MediaId> thumbnail_of(const Message& msg) {
  for (const auto& m : msg.media) {
    if (m.kind == MediaKind::image) return m.id;
  }
  return std::nullopt;
}

NewsItem summarize(const Message& msg, bool with_media_list) {
  NewsItem item{
      .id = msg.id,
      .title = msg.title,
      .author = msg.author,
      .place = msg.place,
      .category = msg.category,
      .body = msg.body,
      .created_at = msg.created_at,
      .status = msg.status,
      .media_count = msg.media.size(),
      .thumbnail = thumbnail_of(msg),
      .media = {},
  };
  if (with_media_list) {
    for (const auto& m : msg.media) {
      item.media.push_back({m.id, m.kind, m.format, m.byte_length});
    }
  }
  return item;
}

PageSlice paginate(std::span<const MessageId> ordered_ids, std::size_t page) {
  if (page == 0) throw std::invalid_argument("page numbers start at 1");
  PageSlice slice;
  slice.page = page;
  slice.total_matches = ordered_ids.size();
  const std::size_t total = ordered_ids.size();
  // Guard the multiplication for absurd page numbers.
  const std::size_t begin = (page - 1) <= total / kPageSize ? (page - 1) * kPageSize : total;
  const std::size_t end = std::min(total, begin + kPageSize);
  if (begin < total) slice.ids.assign(ordered_ids.begin() + begin, ordered_ids.begin() + end);
  slice.has_more = end < total && begin < total;
  return slice;
}

}  // namespace newsroom
