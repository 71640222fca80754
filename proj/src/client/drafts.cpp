#include "newsroom/client/drafts.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <random>

#include "json.hpp"
#include "newsroom/client/config.hpp"

namespace newsroom::client {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using K = ClientError::Kind;

constexpr std::string_view kManifest = "manifest.json";

json to_json(const Draft& d) {
  json attachments = json::array();
  for (const auto& a : d.attachments) {
    attachments.push_back(
        {{"source", a.source.string()}, {"kind", to_string(a.kind)}, {"format", a.format}});
  }
  json media = json::array();
  for (const auto& m : d.state.media_ids) media.push_back(m.value);
  json state = {{"phase", to_string(d.state.phase)}, {"media_ids", media}};
  if (d.state.message_id) state["message_id"] = d.state.message_id->value;
  return {{"id", d.id},
          {"title", d.fields.title},
          {"body", d.fields.body},
          {"place", d.fields.place},
          {"category", d.fields.category},
          {"created_at", format_rfc3339(d.created_at)},
          {"attachments", attachments},
          {"state", state}};
}

UploadPhase parse_phase(std::string_view s) {
  if (s == "unsent") return UploadPhase::unsent;
  if (s == "text_sent") return UploadPhase::text_sent;
  if (s == "complete") return UploadPhase::complete;
  throw std::invalid_argument("unknown upload phase '" + std::string(s) + "'");
}

Draft from_json(const json& j) {
  Draft d;
  d.id = j.at("id").get<std::string>();
  d.fields = {j.at("title").get<std::string>(), j.at("body").get<std::string>(),
              j.at("place").get<std::string>(), j.at("category").get<std::string>()};
  const auto created = parse_rfc3339(j.at("created_at").get<std::string>());
  if (!created) throw std::invalid_argument("bad created_at");
  d.created_at = *created;
  for (const auto& a : j.at("attachments")) {
    const auto kind = parse_media_kind(a.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument("bad attachment kind");
    d.attachments.push_back(
        {fs::path(a.at("source").get<std::string>()), *kind, a.at("format").get<std::string>()});
  }
  const auto& s = j.at("state");
  d.state.phase = parse_phase(s.at("phase").get<std::string>());
  if (s.contains("message_id")) d.state.message_id = MessageId{s.at("message_id").get<std::int64_t>()};
  for (const auto& m : s.at("media_ids")) d.state.media_ids.push_back(MediaId{m.get<std::int64_t>()});
  return d;
}

bool sniff(MediaKind kind, std::string_view head) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(head[i]); };
  switch (kind) {
    case MediaKind::image:
      return head.size() >= 3 && byte(0) == 0xFF && byte(1) == 0xD8 && byte(2) == 0xFF;
    case MediaKind::audio:
      if (head.substr(0, 3) == "ID3") return true;
      return head.size() >= 2 && byte(0) == 0xFF && (byte(1) & 0xE0) == 0xE0;
    case MediaKind::video:
      return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(UploadPhase p) {
  switch (p) {
    case UploadPhase::unsent: return "unsent";
    case UploadPhase::text_sent: return "text_sent";
    case UploadPhase::complete: return "complete";
  }
  return "unsent";
}

std::string check_attachment(const fs::path& file, MediaKind kind) {
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) {
    throw ClientError(K::file_not_found, "no such file: " + file.string());
  }
  const std::string ext = file.extension().string();
  const std::string format = normalize_format(ext);
  if (!format_allowed(kind, format)) {
    throw ClientError(K::format_mismatch, file.filename().string() + ": " +
                                              std::string(to_string(kind)) + " must be " +
                                              (kind == MediaKind::image   ? "jpeg"
                                               : kind == MediaKind::audio ? "mp3"
                                                                          : "a named format"));
  }
  std::ifstream in(file, std::ios::binary);
  char head[4] = {};
  in.read(head, sizeof head);
  if (!sniff(kind, std::string_view(head, static_cast<std::size_t>(in.gcount())))) {
    throw ClientError(K::format_mismatch, file.filename().string() + ": content is not " + format);
  }
  return format;
}

DraftStore::DraftStore(fs::path root) : root_(std::move(root)) {}

fs::path DraftStore::dir_of(std::string_view draft_id) const {
  // Draft ids are generated hex; anything else cannot name a draft.
  if (draft_id.empty() ||
      !std::all_of(draft_id.begin(), draft_id.end(),
                   [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); })) {
    throw ClientError(K::no_such_draft, "no draft '" + std::string(draft_id) + "'");
  }
  return root_ / std::string(draft_id);
}

std::string DraftStore::fresh_id() const {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  for (;;) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rng() & 0xFFFFFFFFu));
    const std::string id(buf);
    if (!fs::exists(root_ / id)) return id;
  }
}

Draft DraftStore::compose(const MessageFields& fields) {
  MessageFields local = fields;
  ValidationResult check;
  if (local.title.empty()) check.errors.push_back({"title", "must not be empty"});
  if (local.body.empty()) check.errors.push_back({"body", "must not be empty"});
  if (check.ok()) check = validate_message(local);
  if (!check.ok()) {
    std::string names;
    for (const auto& e : check.errors) names += (names.empty() ? "" : ", ") + e.field;
    throw ClientError(K::validation, "invalid draft: " + names, check.errors);
  }
  Draft d;
  d.id = fresh_id();
  d.fields = std::move(local);
  d.created_at = now_utc();
  save(d);
  return d;
}

Draft DraftStore::attach(std::string_view draft_id, const fs::path& file, MediaKind kind) {
  Draft d = get(draft_id);
  if (d.state.phase == UploadPhase::complete) {
    throw ClientError(K::validation, "draft " + d.id + " is already uploaded");
  }
  const std::string format = check_attachment(file, kind);
  d.attachments.push_back({fs::absolute(file), kind, format});
  save(d);
  return d;
}

Draft DraftStore::get(std::string_view draft_id) const {
  const auto raw = detail::slurp(dir_of(draft_id) / kManifest);
  if (!raw) throw ClientError(K::no_such_draft, "no draft '" + std::string(draft_id) + "'");
  try {
    return from_json(json::parse(*raw));
  } catch (const std::exception& e) {
    throw ClientError(K::validation, "corrupt draft " + std::string(draft_id) + ": " + e.what());
  }
}

std::vector<Draft> DraftStore::list() const {
  std::vector<Draft> out;
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) return out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (!entry.is_directory() || !fs::exists(entry.path() / kManifest)) continue;
    out.push_back(get(entry.path().filename().string()));
  }
  std::sort(out.begin(), out.end(), [](const Draft& a, const Draft& b) {
    return a.created_at != b.created_at ? a.created_at < b.created_at : a.id < b.id;
  });
  return out;
}

void DraftStore::remove(std::string_view draft_id) {
  const fs::path dir = dir_of(draft_id);
  if (!fs::exists(dir / kManifest)) {
    throw ClientError(K::no_such_draft, "no draft '" + std::string(draft_id) + "'");
  }
  fs::remove_all(dir);
}

void DraftStore::save(const Draft& d) {
  detail::replace_file(dir_of(d.id) / kManifest, to_json(d).dump(2) + "\n");
}

fs::path DraftStore::retained_copy(const Draft& d, std::size_t index) const {
  return dir_of(d.id) / "media" / (std::to_string(index) + "." + d.attachments.at(index).format);
}

}  // namespace newsroom::client
