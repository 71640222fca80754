#include "newsroom/store/store.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "newsroom/core/text.hpp"
#include "record_file.hpp"

namespace newsroom::store {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kFormat = "newsroom-records";
constexpr int kFormatVersion = 1;

std::int64_t millis(Timestamp t) { return t.time_since_epoch().count(); }
Timestamp from_millis(std::int64_t ms) { return Timestamp{std::chrono::milliseconds{ms}}; }

[[noreturn]] void not_found(MessageId id) {
  throw StoreError(StoreError::Kind::not_found, "no message " + std::to_string(id.value));
}

json media_record(const MediaAttachment& m) {
  return {{"id", m.id.value},
          {"kind", to_string(m.kind)},
          {"format", m.format},
          {"byte_length", m.byte_length},
          {"storage_path", m.storage_path}};
}

json message_record(const Message& m) {
  json media = json::array();
  for (const auto& a : m.media) media.push_back(media_record(a));
  return {{"type", "message"},
          {"id", m.id.value},
          {"title", m.title},
          {"body", m.body},
          {"place", m.place},
          {"category", m.category},
          {"author", m.author},
          {"created_at", millis(m.created_at)},
          {"updated_at", millis(m.updated_at)},
          {"status", to_string(m.status)},
          {"media", std::move(media)}};
}

std::string serialize(const StoreState& s) {
  std::ostringstream out;
  std::size_t records = 0;
  auto emit = [&](const json& j) {
    out << j.dump() << '\n';
    ++records;
  };
  out << json{{"format", kFormat},
              {"version", kFormatVersion},
              {"next_user_id", s.next_user_id},
              {"next_message_id", s.next_message_id},
              {"next_media_id", s.next_media_id}}
             .dump()
      << '\n';
  for (const auto& [_, u] : s.users) {
    emit({{"type", "user"},
          {"id", u.id.value},
          {"first_name", u.first_name},
          {"last_name", u.last_name},
          {"username", u.username},
          {"password_digest", u.password_digest}});
  }
  for (const auto& [_, sess] : s.sessions) {
    emit({{"type", "session"},
          {"token", sess.token},
          {"username", sess.username},
          {"issued_at", millis(sess.issued_at)}});
  }
  for (const auto& c : s.categories) emit({{"type", "category"}, {"name", c}});
  for (const auto& [_, m] : s.messages) emit(message_record(m));
  out << json{{"type", "end"}, {"records", records}}.dump() << '\n';
  return std::move(out).str();
}

StoreState deserialize(const std::string& bytes) {
  StoreState s;
  std::istringstream in(bytes);
  std::string line;
  if (!std::getline(in, line)) throw StoreError(StoreError::Kind::corrupt, "empty record file");
  const json header = json::parse(line);
  if (header.at("format") != kFormat || header.at("version") != kFormatVersion) {
    throw StoreError(StoreError::Kind::corrupt, "unsupported record file format");
  }
  s.next_user_id = header.at("next_user_id");
  s.next_message_id = header.at("next_message_id");
  s.next_media_id = header.at("next_media_id");

  std::size_t records = 0;
  bool ended = false;
  while (std::getline(in, line)) {
    if (ended) throw StoreError(StoreError::Kind::corrupt, "records after end marker");
    const json r = json::parse(line);
    const std::string type = r.at("type");
    if (type == "end") {
      if (r.at("records").get<std::size_t>() != records) {
        throw StoreError(StoreError::Kind::corrupt, "record count mismatch");
      }
      ended = true;
      continue;
    }
    ++records;
    if (type == "user") {
      User u{UserId{r.at("id")}, r.at("first_name"), r.at("last_name"), r.at("username"),
             r.at("password_digest")};
      s.users.emplace(u.username, std::move(u));
    } else if (type == "session") {
      Session sess{r.at("token"), r.at("username"), from_millis(r.at("issued_at"))};
      s.sessions.emplace(sess.token, std::move(sess));
    } else if (type == "category") {
      s.categories.push_back(r.at("name"));
    } else if (type == "message") {
      Message m;
      m.id = MessageId{r.at("id")};
      m.title = r.at("title");
      m.body = r.at("body");
      m.place = r.at("place");
      m.category = r.at("category");
      m.author = r.at("author");
      m.created_at = from_millis(r.at("created_at"));
      m.updated_at = from_millis(r.at("updated_at"));
      m.status = parse_status(r.at("status").get<std::string>()).value();
      for (const auto& a : r.at("media")) {
        m.media.push_back(MediaAttachment{MediaId{a.at("id")}, m.id,
                                          parse_media_kind(a.at("kind").get<std::string>()).value(),
                                          a.at("format"), a.at("byte_length"),
                                          a.at("storage_path")});
      }
      s.messages.emplace(m.id, std::move(m));
    } else {
      throw StoreError(StoreError::Kind::corrupt, "unknown record type " + type);
    }
  }
  if (!ended) throw StoreError(StoreError::Kind::corrupt, "record file is truncated");
  return s;
}

void write_blob(const fs::path& target, std::string_view bytes) {
  fs::create_directories(target.parent_path());
  detail::fsync_directory(target.parent_path().parent_path());
  detail::write_atomically(target, bytes);
}

void check_validation(const ValidationResult& r) {
  if (r.ok()) return;
  std::string what = "invalid";
  for (const auto& e : r.errors) what += " " + e.field;
  throw StoreError(StoreError::Kind::validation, what, r.errors);
}

}  // namespace

Store::Store(fs::path data_dir, StoreOptions options)
    : data_dir_(std::move(data_dir)), options_(std::move(options)) {
  fs::create_directories(data_dir_ / kMediaDir);
  load();
  sweep_media();
}

void Store::load() {
  const fs::path records = data_dir_ / kRecordsFile;
  fs::remove(fs::path(records).concat(".tmp"));
  const auto bytes = detail::read_file(records);
  if (!bytes) {
    detail::write_atomically(records, serialize(state_));
    return;
  }
  try {
    state_ = deserialize(*bytes);
  } catch (const json::exception& e) {
    throw StoreError(StoreError::Kind::corrupt, std::string("record file: ") + e.what());
  } catch (const std::bad_optional_access&) {
    throw StoreError(StoreError::Kind::corrupt, "record file: bad enum value");
  }
}

void Store::sweep_media() {
  std::set<fs::path> referenced;
  for (const auto& [_, m] : state_.messages) {
    for (const auto& a : m.media) referenced.insert(data_dir_ / a.storage_path);
  }
  const fs::path media_root = data_dir_ / kMediaDir;
  std::vector<fs::path> stale;
  for (const auto& dir : fs::directory_iterator(media_root)) {
    if (!dir.is_directory()) {
      stale.push_back(dir.path());
      continue;
    }
    for (const auto& f : fs::directory_iterator(dir.path())) {
      if (!referenced.contains(f.path())) stale.push_back(f.path());
    }
  }
  for (const auto& p : stale) fs::remove_all(p);
  for (const auto& dir : fs::directory_iterator(media_root)) {
    if (dir.is_directory() && fs::is_empty(dir.path())) fs::remove(dir.path());
  }
}

void Store::commit(StoreState next) {
  detail::write_atomically(data_dir_ / kRecordsFile, serialize(next));
  state_ = std::move(next);
}

std::string Store::resolve_category(const StoreState& state, std::string_view name) const {
  for (const auto& c : state.categories) {
    if (text::equal_folded(c, name)) return c;
  }
  return std::string(name);
}

Message& Store::existing(StoreState& state, MessageId id) const {
  auto it = state.messages.find(id);
  if (it == state.messages.end()) not_found(id);
  return it->second;
}

UserId Store::create_user(std::string_view first_name, std::string_view last_name,
                          std::string_view username, std::string_view password) {
  check_validation(validate_registration(first_name, last_name, username, password));
  // Hash outside the lock; PBKDF2 is the slow part.
  std::string digest = hash_password(password, options_.password_iterations);

  std::unique_lock lock(mutex_);
  if (state_.users.contains(std::string(username))) {
    throw StoreError(StoreError::Kind::duplicate_username,
                     "username " + std::string(username) + " is taken");
  }
  StoreState next = state_;
  const UserId id{next.next_user_id++};
  next.users.emplace(std::string(username), User{id, std::string(first_name),
                                                 std::string(last_name), std::string(username),
                                                 std::move(digest)});
  commit(std::move(next));
  return id;
}

std::optional<User> Store::find_user(std::string_view username) const {
  std::shared_lock lock(mutex_);
  auto it = state_.users.find(std::string(username));
  if (it == state_.users.end()) return std::nullopt;
  return it->second;
}

Session Store::authenticate(std::string_view username, std::string_view password) {
  const auto user = find_user(username);
  if (!user) {
    // Same work as a real check so unknown names are not cheaper to probe.
    static const std::string dummy = hash_password("", options_.password_iterations);
    verify_password(password, dummy);
    throw StoreError(StoreError::Kind::bad_credentials, "bad username or password");
  }
  if (!verify_password(password, user->password_digest)) {
    throw StoreError(StoreError::Kind::bad_credentials, "bad username or password");
  }
  Session session{new_session_token(), user->username, options_.clock()};

  std::unique_lock lock(mutex_);
  StoreState next = state_;
  next.sessions.emplace(session.token, session);
  commit(std::move(next));
  return session;
}

std::optional<std::string> Store::session_user(std::string_view token) const {
  std::shared_lock lock(mutex_);
  auto it = state_.sessions.find(std::string(token));
  if (it == state_.sessions.end()) return std::nullopt;
  return it->second.username;
}

MessageId Store::insert_message(const MessageFields& fields, std::string_view author) {
  check_validation(validate_message(fields));
  std::unique_lock lock(mutex_);
  StoreState next = state_;
  Message m;
  m.id = MessageId{next.next_message_id++};
  m.title = fields.title;
  m.body = fields.body;
  m.place = fields.place;
  m.category = resolve_category(next, fields.category);
  m.author = std::string(author);
  m.created_at = options_.clock();
  m.updated_at = m.created_at;
  m.status = MessageStatus::active;
  if (m.category == fields.category &&
      std::find(next.categories.begin(), next.categories.end(), m.category) ==
          next.categories.end()) {
    next.categories.push_back(m.category);
  }
  const MessageId id = m.id;
  next.messages.emplace(id, std::move(m));
  commit(std::move(next));
  return id;
}

Message Store::update_message(MessageId id, const MessagePatch& patch) {
  if (patch.empty()) throw StoreError(StoreError::Kind::validation, "nothing to update");
  check_validation(validate_patch(patch));
  std::unique_lock lock(mutex_);
  StoreState next = state_;
  Message& m = existing(next, id);
  if (patch.title) m.title = *patch.title;
  if (patch.body) m.body = *patch.body;
  if (patch.place) m.place = *patch.place;
  if (patch.category) {
    m.category = resolve_category(next, *patch.category);
    if (m.category == *patch.category &&
        std::find(next.categories.begin(), next.categories.end(), m.category) ==
            next.categories.end()) {
      next.categories.push_back(m.category);
    }
  }
  m.updated_at = std::max(options_.clock(), m.created_at);
  Message updated = m;
  commit(std::move(next));
  return updated;
}

Message Store::get_message(MessageId id) const {
  std::shared_lock lock(mutex_);
  auto it = state_.messages.find(id);
  if (it == state_.messages.end()) not_found(id);
  return it->second;
}

void Store::delete_message(MessageId id) {
  std::unique_lock lock(mutex_);
  StoreState next = state_;
  existing(next, id);
  next.messages.erase(id);
  commit(std::move(next));
  std::error_code ec;
  fs::remove_all(data_dir_ / kMediaDir / std::to_string(id.value), ec);
}

Message Store::set_status(MessageId id, MessageStatus status) {
  std::unique_lock lock(mutex_);
  StoreState next = state_;
  Message& m = existing(next, id);
  if (m.status == status) return m;
  m.status = status;
  Message updated = m;
  commit(std::move(next));
  return updated;
}

MediaId Store::attach_media(MessageId message_id, MediaKind kind, std::string_view format,
                            std::string_view bytes) {
  if (!format_allowed(kind, format)) {
    throw StoreError(StoreError::Kind::format_mismatch,
                     std::string(to_string(kind)) + " does not accept format '" +
                         std::string(format) + "'");
  }
  if (bytes.size() > options_.max_blob_bytes) {
    throw StoreError(StoreError::Kind::blob_too_large,
                     "blob of " + std::to_string(bytes.size()) + " bytes exceeds limit of " +
                         std::to_string(options_.max_blob_bytes));
  }
  std::unique_lock lock(mutex_);
  StoreState next = state_;
  Message& m = existing(next, message_id);
  MediaAttachment a;
  a.id = MediaId{next.next_media_id++};
  a.message_id = message_id;
  a.kind = kind;
  a.format = std::string(format);
  a.byte_length = bytes.size();
  a.storage_path = (fs::path(kMediaDir) / std::to_string(message_id.value) /
                    (std::to_string(a.id.value) + "." + a.format))
                       .generic_string();
  const fs::path target = data_dir_ / a.storage_path;
  const MediaId id = a.id;
  m.media.push_back(std::move(a));

  write_blob(target, bytes);
  try {
    commit(std::move(next));
  } catch (...) {
    std::error_code ec;
    fs::remove(target, ec);
    throw;
  }
  return id;
}

std::pair<MediaAttachment, std::string> Store::read_media(MessageId message_id,
                                                          MediaId media_id) const {
  MediaAttachment meta;
  {
    std::shared_lock lock(mutex_);
    auto it = state_.messages.find(message_id);
    if (it == state_.messages.end()) not_found(message_id);
    const auto& media = it->second.media;
    auto a = std::find_if(media.begin(), media.end(),
                          [&](const MediaAttachment& x) { return x.id == media_id; });
    if (a == media.end()) {
      throw StoreError(StoreError::Kind::not_found,
                       "no media " + std::to_string(media_id.value) + " on message " +
                           std::to_string(message_id.value));
    }
    meta = *a;
  }
  auto bytes = detail::read_file(blob_path(meta));
  // Deleted between the metadata read and the file read.
  if (!bytes) throw StoreError(StoreError::Kind::not_found, "media blob is gone");
  return {std::move(meta), std::move(*bytes)};
}

fs::path Store::blob_path(const MediaAttachment& m) const { return data_dir_ / m.storage_path; }

std::vector<Message> Store::search(std::string_view keyword, SearchField field) const {
  std::vector<Message> hits;
  {
    std::shared_lock lock(mutex_);
    for (const auto& [_, m] : state_.messages) {
      if (message_matches(m, keyword, field)) hits.push_back(m);
    }
  }
  std::sort(hits.begin(), hits.end(), newer_first);
  return hits;
}

std::vector<MessageId> Store::search_messages(std::string_view keyword, SearchField field) const {
  std::vector<MessageId> ids;
  for (const auto& m : search(keyword, field)) ids.push_back(m.id);
  return ids;
}

std::vector<Message> Store::list_recent() const {
  std::shared_lock lock(mutex_);
  std::vector<Message> all;
  for (const auto& [_, m] : state_.messages) {
    if (m.status == MessageStatus::active) all.push_back(m);
  }
  return viewer_order(all);
}

std::vector<std::string> Store::list_categories() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> names = state_.categories;
  std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
    const int c = text::compare_folded(a, b);
    return c != 0 ? c < 0 : a < b;
  });
  return names;
}

std::vector<Message> Store::list_by_category(std::string_view name) const {
  std::shared_lock lock(mutex_);
  const auto known = std::find_if(state_.categories.begin(), state_.categories.end(),
                                  [&](const std::string& c) { return text::equal_folded(c, name); });
  if (known == state_.categories.end()) {
    throw StoreError(StoreError::Kind::unknown_category, "no category " + std::string(name));
  }
  std::vector<Message> members;
  for (const auto& [_, m] : state_.messages) {
    if (m.status == MessageStatus::active && m.category == *known) members.push_back(m);
  }
  return viewer_order(members);
}

StoreState Store::snapshot() const {
  std::shared_lock lock(mutex_);
  return state_;
}

}  // namespace newsroom::store
