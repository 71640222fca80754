#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "newsroom/core/time.hpp"

namespace newsroom {

template <class Tag>
struct Id {
  std::int64_t value = 0;

  friend auto operator<=>(const Id&, const Id&) = default;
};

using UserId = Id<struct UserTag>;
using MessageId = Id<struct MessageTag>;
using MediaId = Id<struct MediaTag>;

/// Search results and wire segments carry at most this many items.
inline constexpr std::size_t kPageSize = 5;

inline constexpr std::size_t kMaxTitleChars = 256;
inline constexpr std::size_t kMaxUsernameChars = 64;
inline constexpr std::size_t kMinPasswordChars = 6;

enum class MessageStatus { active, inactive };
enum class MediaKind { image, audio, video };
enum class SearchField { title, body, author };

std::string_view to_string(MessageStatus s);
std::string_view to_string(MediaKind k);
std::string_view to_string(SearchField f);
std::optional<MessageStatus> parse_status(std::string_view s);
std::optional<MediaKind> parse_media_kind(std::string_view s);
std::optional<SearchField> parse_search_field(std::string_view s);

struct User {
  UserId id;
  std::string first_name;
  std::string last_name;
  std::string username;
  std::string password_digest;

  friend bool operator==(const User&, const User&) = default;
};

struct MediaAttachment {
  MediaId id;
  MessageId message_id;
  MediaKind kind = MediaKind::image;
  std::string format;
  std::uint64_t byte_length = 0;
  std::string storage_path;  // relative to the store's data directory

  friend bool operator==(const MediaAttachment&, const MediaAttachment&) = default;
};

struct Message {
  MessageId id;
  std::string title;
  std::string body;
  std::string place;
  std::string category;
  std::string author;
  Timestamp created_at;
  Timestamp updated_at;
  MessageStatus status = MessageStatus::active;
  std::vector<MediaAttachment> media;

  friend bool operator==(const Message&, const Message&) = default;
};

/// The reporter-editable part of a message.
struct MessageFields {
  std::string title;
  std::string body;
  std::string place;
  std::string category;
};

/// Partial edit: only engaged fields change.
struct MessagePatch {
  std::optional<std::string> title;
  std::optional<std::string> body;
  std::optional<std::string> place;
  std::optional<std::string> category;

  bool empty() const { return !title && !body && !place && !category; }
};

struct FieldError {
  std::string field;
  std::string reason;

  friend bool operator==(const FieldError&, const FieldError&) = default;
};

struct ValidationResult {
  std::vector<FieldError> errors;

  bool ok() const { return errors.empty(); }
  bool names(std::string_view field) const;
};

ValidationResult validate_registration(std::string_view first_name, std::string_view last_name,
                                       std::string_view username, std::string_view password);

ValidationResult validate_message(const MessageFields& fields);
ValidationResult validate_patch(const MessagePatch& patch);

/// Media format names are lowercase file extensions, with `jpg` spelled
/// `jpeg`.
std::string normalize_format(std::string_view extension_or_format);

/// Images must be jpeg and audio must be mp3. Video accepts any non-empty
/// format.
bool format_allowed(MediaKind kind, std::string_view format);

struct SearchQuery {
  std::string keyword;
  SearchField field = SearchField::title;
  std::size_t page = 1;
};

/// Case-insensitive substring test on the selected field. The author field
/// is the author's username.
bool message_matches(const Message& msg, std::string_view keyword, SearchField field);

/// Newest first; equal timestamps put the larger id first.
bool newer_first(const Message& a, const Message& b);

/// Active messages only, in newer_first order.
std::vector<Message> viewer_order(std::span<const Message> messages);

struct MediaInfo {
  MediaId id;
  MediaKind kind = MediaKind::image;
  std::string format;
  std::uint64_t byte_length = 0;

  friend bool operator==(const MediaInfo&, const MediaInfo&) = default;
};

/// One `<news>` element: the message text with attachment metadata but never
/// attachment bytes. `media` is filled only on single-message responses.
struct NewsItem {
  MessageId id;
  std::string title;
  std::string author;
  std::string place;
  std::string category;
  std::string body;
  Timestamp created_at;
  MessageStatus status = MessageStatus::active;
  std::size_t media_count = 0;
  std::optional<MediaId> thumbnail;
  std::vector<MediaInfo> media;

  friend bool operator==(const NewsItem&, const NewsItem&) = default;
};

/// First image attachment, used as the viewer thumbnail.
std::optional<MediaId> thumbnail_of(const Message& msg);

NewsItem summarize(const Message& msg, bool with_media_list = false);

struct ResultPage {
  std::size_t page = 1;
  std::size_t total_matches = 0;
  bool has_more = false;
  std::vector<NewsItem> items;

  friend bool operator==(const ResultPage&, const ResultPage&) = default;
};

struct PageSlice {
  std::size_t page = 1;
  std::size_t total_matches = 0;
  bool has_more = false;
  std::vector<MessageId> ids;
};

/// Slices `ordered_ids` into the 1-based page `page`. Pages past the end are
/// empty with has_more=false. Throws std::invalid_argument for page 0.
PageSlice paginate(std::span<const MessageId> ordered_ids, std::size_t page);

}  // namespace newsroom

template <class Tag>
struct std::hash<newsroom::Id<Tag>> {
  std::size_t operator()(const newsroom::Id<Tag>& id) const noexcept {
    return std::hash<std::int64_t>{}(id.value);
  }
};
