#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "newsroom/core/model.hpp"

namespace newsroom::client {

struct Attachment {
  std::filesystem::path source;  // the reporter's file, referenced until upload
  MediaKind kind = MediaKind::image;
  std::string format;

  friend bool operator==(const Attachment&, const Attachment&) = default;
};

enum class UploadPhase { unsent, text_sent, complete };

std::string_view to_string(UploadPhase p);

/// Moves only forward: unsent, then text_sent once the message exists on the
/// server, then complete once every attachment has been accepted.
struct UploadState {
  UploadPhase phase = UploadPhase::unsent;
  std::optional<MessageId> message_id;
  std::vector<MediaId> media_ids;  // one per attachment already sent, in order

  friend bool operator==(const UploadState&, const UploadState&) = default;
};

struct Draft {
  std::string id;
  MessageFields fields;
  std::vector<Attachment> attachments;
  UploadState state;
  Timestamp created_at;

  std::size_t media_sent() const { return state.media_ids.size(); }
};

/// Checks a file against the kind/format rule by extension and by leading
/// bytes. Returns the normalized format or throws file_not_found /
/// format_mismatch.
std::string check_attachment(const std::filesystem::path& file, MediaKind kind);

/// Saved items: one directory per draft holding manifest.json and, once
/// uploaded, copies of its attachments.
///
///   <root>/<draft_id>/manifest.json
///   <root>/<draft_id>/media/<index>.<format>
class DraftStore {
 public:
  explicit DraftStore(std::filesystem::path root);

  Draft compose(const MessageFields& fields);
  Draft attach(std::string_view draft_id, const std::filesystem::path& file, MediaKind kind);
  Draft get(std::string_view draft_id) const;
  /// Oldest first.
  std::vector<Draft> list() const;
  /// Removes the local record only.
  void remove(std::string_view draft_id);
  void save(const Draft& draft);

  /// Local copy of attachment `index`, made when the draft is uploaded.
  std::filesystem::path retained_copy(const Draft& draft, std::size_t index) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path dir_of(std::string_view draft_id) const;
  std::string fresh_id() const;

  std::filesystem::path root_;
};

}  // namespace newsroom::client
