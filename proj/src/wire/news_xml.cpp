#include "newsroom/wire/news_xml.hpp"

#include <array>
#include <optional>

#include "newsroom/xml/writer.hpp"
#include "reader.hpp"

namespace newsroom::wire {
namespace {

using detail::DocReader;
using detail::parse_number;
using detail::require_attr;
using xml::EventKind;

void write_news(xml::XmlWriter& w, const NewsItem& item) {
  w.start("news", {{"id", std::to_string(item.id.value)}});
  w.element("title", item.title);
  w.element("author", item.author);
  w.element("place", item.place);
  w.element("category", item.category);
  w.element("body", item.body);
  w.element("created", format_rfc3339(item.created_at));
  w.element("status", to_string(item.status));
  std::vector<xml::Attribute> media_attrs{{"count", std::to_string(item.media_count)}};
  if (item.thumbnail) media_attrs.push_back({"thumb", std::to_string(item.thumbnail->value)});
  w.start("media", media_attrs);
  for (const auto& m : item.media) {
    w.start("file", {{"id", std::to_string(m.id.value)},
                     {"kind", std::string(to_string(m.kind))},
                     {"format", m.format},
                     {"bytes", std::to_string(m.byte_length)}});
    w.end("file");
  }
  w.end("media");
  w.end("news");
}

void read_media(DocReader& r, const xml::Event& start, NewsItem& item) {
  item.media_count = parse_number<std::size_t>(require_attr(start, "count"), "media count");
  if (const std::string* thumb = start.attribute("thumb")) {
    item.thumbnail = MediaId{parse_number<std::int64_t>(*thumb, "media thumb")};
  }
  for (;;) {
    xml::Event e = r.next();
    if (e.kind == EventKind::end_tag) return;
    if (e.kind != EventKind::start_tag || e.name != "file") {
      throw ProtocolError("unexpected " + xml::describe(e) + " inside <media>");
    }
    MediaInfo info;
    info.id = MediaId{parse_number<std::int64_t>(require_attr(e, "id"), "file id")};
    const auto kind = parse_media_kind(require_attr(e, "kind"));
    if (!kind) throw ProtocolError("unknown media kind '" + require_attr(e, "kind") + "'");
    info.kind = *kind;
    info.format = require_attr(e, "format");
    info.byte_length = parse_number<std::uint64_t>(require_attr(e, "bytes"), "file bytes");
    r.expect_empty("file");
    item.media.push_back(std::move(info));
  }
}

// `start` is the already-consumed <news> start tag.
NewsItem read_news(DocReader& r, const xml::Event& start) {
  static constexpr std::array<std::string_view, 8> kChildren{
      "title", "author", "place", "category", "body", "created", "status", "media"};
  std::array<bool, kChildren.size()> seen{};

  NewsItem item;
  item.id = MessageId{parse_number<std::int64_t>(require_attr(start, "id"), "news id")};
  for (;;) {
    xml::Event e = r.next();
    if (e.kind == EventKind::end_tag) break;
    if (e.kind != EventKind::start_tag) {
      throw ProtocolError("unexpected " + xml::describe(e) + " inside <news>");
    }
    std::size_t slot = kChildren.size();
    for (std::size_t i = 0; i < kChildren.size(); ++i) {
      if (kChildren[i] == e.name) slot = i;
    }
    if (slot == kChildren.size()) throw ProtocolError("unexpected <" + e.name + "> in <news>");
    if (seen[slot]) throw ProtocolError("duplicate <" + e.name + "> in <news>");
    seen[slot] = true;

    if (e.name == "media") {
      read_media(r, e, item);
      continue;
    }
    std::string value = r.text_until_end(e.name);
    if (e.name == "title") {
      item.title = std::move(value);
    } else if (e.name == "author") {
      item.author = std::move(value);
    } else if (e.name == "place") {
      item.place = std::move(value);
    } else if (e.name == "category") {
      item.category = std::move(value);
    } else if (e.name == "body") {
      item.body = std::move(value);
    } else if (e.name == "created") {
      const auto t = parse_rfc3339(value);
      if (!t) throw ProtocolError("bad timestamp '" + value + "' in <created>");
      item.created_at = *t;
    } else if (e.name == "status") {
      const auto s = parse_status(value);
      if (!s) throw ProtocolError("unknown status '" + value + "'");
      item.status = *s;
    }
  }
  for (std::size_t i = 0; i < kChildren.size(); ++i) {
    if (!seen[i]) throw ProtocolError("missing <" + std::string(kChildren[i]) + "> in <news>");
  }
  return item;
}

}  // namespace

std::string encode_result_page(const ResultPage& page) {
  xml::XmlWriter w;
  w.start("newslist", {{"page", std::to_string(page.page)},
                       {"total", std::to_string(page.total_matches)},
                       {"more", page.has_more ? "true" : "false"}});
  for (const auto& item : page.items) write_news(w, item);
  w.end("newslist");
  return w.finish();
}

ResultPage decode_result_page(std::string_view bytes) {
  DocReader r(bytes);
  const xml::Event root = r.expect_start("newslist");
  ResultPage page;
  page.page = parse_number<std::size_t>(require_attr(root, "page"), "page");
  page.total_matches = parse_number<std::size_t>(require_attr(root, "total"), "total");
  page.has_more = detail::parse_bool(require_attr(root, "more"), "more");
  for (;;) {
    xml::Event e = r.next();
    if (e.kind == EventKind::end_tag) break;
    if (e.kind != EventKind::start_tag || e.name != "news") {
      throw ProtocolError("unexpected " + xml::describe(e) + " inside <newslist>");
    }
    page.items.push_back(read_news(r, e));
  }
  r.expect_end_document();
  return page;
}

std::string encode_news_list(const std::vector<NewsItem>& items) {
  return encode_result_page(ResultPage{1, items.size(), false, items});
}

std::string encode_news(const NewsItem& item) {
  xml::XmlWriter w;
  write_news(w, item);
  return w.finish();
}

NewsItem decode_news(std::string_view bytes) {
  DocReader r(bytes);
  const xml::Event root = r.expect_start("news");
  NewsItem item = read_news(r, root);
  r.expect_end_document();
  return item;
}

std::string encode_session(std::string_view token) {
  xml::XmlWriter w;
  w.start("session", {{"token", std::string(token)}});
  w.end("session");
  return w.finish();
}

std::string decode_session(std::string_view bytes) {
  DocReader r(bytes);
  const xml::Event root = r.expect_start("session");
  std::string token = require_attr(root, "token");
  r.expect_empty("session");
  r.expect_end_document();
  return token;
}

std::string encode_created(std::int64_t id) {
  xml::XmlWriter w;
  w.start("created", {{"id", std::to_string(id)}});
  w.end("created");
  return w.finish();
}

std::int64_t decode_created(std::string_view bytes) {
  DocReader r(bytes);
  const xml::Event root = r.expect_start("created");
  const auto id = parse_number<std::int64_t>(require_attr(root, "id"), "created id");
  r.expect_empty("created");
  r.expect_end_document();
  return id;
}

std::string encode_categories(const std::vector<std::string>& names) {
  xml::XmlWriter w;
  w.start("categories");
  for (const auto& n : names) w.element("category", n);
  w.end("categories");
  return w.finish();
}

std::vector<std::string> decode_categories(std::string_view bytes) {
  DocReader r(bytes);
  r.expect_start("categories");
  std::vector<std::string> names;
  for (;;) {
    xml::Event e = r.next();
    if (e.kind == EventKind::end_tag) break;
    if (e.kind != EventKind::start_tag || e.name != "category") {
      throw ProtocolError("unexpected " + xml::describe(e) + " inside <categories>");
    }
    names.push_back(r.text_until_end("category"));
  }
  r.expect_end_document();
  return names;
}

}  // namespace newsroom::wire
