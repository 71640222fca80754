#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "newsroom/core/model.hpp"
#include "newsroom/store/password.hpp"

namespace newsroom::store {

class StoreError : public std::runtime_error {
 public:
  enum class Kind {
    validation,
    duplicate_username,
    bad_credentials,
    not_found,
    format_mismatch,
    blob_too_large,
    unknown_category,
    corrupt,
    io,
  };

  StoreError(Kind kind, const std::string& what, std::vector<FieldError> fields = {})
      : std::runtime_error(what), kind_(kind), fields_(std::move(fields)) {}

  Kind kind() const { return kind_; }
  /// Per-field detail for validation errors.
  const std::vector<FieldError>& fields() const { return fields_; }

 private:
  Kind kind_;
  std::vector<FieldError> fields_;
};

struct Session {
  std::string token;
  std::string username;
  Timestamp issued_at;

  friend bool operator==(const Session&, const Session&) = default;
};

inline constexpr std::uint64_t kDefaultMaxBlobBytes = 10ull * 1024 * 1024;

struct StoreOptions {
  int password_iterations = kDefaultPasswordIterations;
  std::uint64_t max_blob_bytes = kDefaultMaxBlobBytes;
  std::function<Timestamp()> clock = now_utc;
};

/// Everything the record file holds. Exposed for snapshot comparisons.
struct StoreState {
  std::int64_t next_user_id = 1;
  std::int64_t next_message_id = 1;
  std::int64_t next_media_id = 1;
  std::map<std::string, User> users;        // by username
  std::map<std::string, Session> sessions;  // by token
  std::map<MessageId, Message> messages;
  std::vector<std::string> categories;  // creation order, case-preserving

  friend bool operator==(const StoreState&, const StoreState&) = default;
};

/// Users, sessions, messages and categories in one record file; media blobs
/// in a directory tree:
///
///   <data_dir>/records.db
///   <data_dir>/media/<message_id>/<media_id>.<format>
///
/// Every mutation rewrites records.db through a temp file, fsync and rename,
/// so a crash leaves either the previous or the new state. Opening a store
/// removes blob files that no committed record references.
///
/// Mutations are serialized; reads run concurrently and see the last
/// committed state.
class Store {
 public:
  explicit Store(std::filesystem::path data_dir, StoreOptions options = {});

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  static constexpr std::string_view kRecordsFile = "records.db";
  static constexpr std::string_view kMediaDir = "media";

  const std::filesystem::path& data_dir() const { return data_dir_; }

  UserId create_user(std::string_view first_name, std::string_view last_name,
                     std::string_view username, std::string_view password);
  std::optional<User> find_user(std::string_view username) const;

  /// Throws bad_credentials for an unknown user and for a wrong password
  /// alike.
  Session authenticate(std::string_view username, std::string_view password);
  /// Username owning `token`, exact match.
  std::optional<std::string> session_user(std::string_view token) const;

  MessageId insert_message(const MessageFields& fields, std::string_view author);
  Message update_message(MessageId id, const MessagePatch& patch);
  Message get_message(MessageId id) const;
  void delete_message(MessageId id);
  Message set_status(MessageId id, MessageStatus status);

  MediaId attach_media(MessageId message_id, MediaKind kind, std::string_view format,
                       std::string_view bytes);
  /// Metadata and blob bytes.
  std::pair<MediaAttachment, std::string> read_media(MessageId message_id, MediaId media_id) const;
  std::filesystem::path blob_path(const MediaAttachment& m) const;

  /// All messages of any status matching the query, newest first.
  std::vector<MessageId> search_messages(std::string_view keyword, SearchField field) const;
  /// As search_messages, returning the messages from one consistent read.
  std::vector<Message> search(std::string_view keyword, SearchField field) const;
  /// Active messages, newest first.
  std::vector<Message> list_recent() const;
  /// Category names sorted case-insensitively.
  std::vector<std::string> list_categories() const;
  /// Active messages in the category (matched case-insensitively).
  std::vector<Message> list_by_category(std::string_view name) const;

  StoreState snapshot() const;

 private:
  void load();
  void sweep_media();
  void commit(StoreState next);
  std::string resolve_category(const StoreState& state, std::string_view name) const;
  Message& existing(StoreState& state, MessageId id) const;

  std::filesystem::path data_dir_;
  StoreOptions options_;
  mutable std::shared_mutex mutex_;
  StoreState state_;
};

}  // namespace newsroom::store
