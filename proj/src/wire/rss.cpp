#include "newsroom/wire/rss.hpp"

#include "newsroom/wire/news_xml.hpp"
#include "newsroom/xml/writer.hpp"
#include "reader.hpp"

namespace newsroom::wire {
namespace {

void write_item(xml::XmlWriter& w, const FeedItem& item) {
  w.start("item");
  w.element("title", item.title);
  w.element("description", item.description);
  w.element("category", item.category);
  w.element("author", item.author);
  w.element("pubDate", format_rfc822(item.published));
  w.element("guid", std::to_string(item.guid.value), {{"isPermaLink", "false"}});
  w.end("item");
}

FeedItem read_item(detail::DocReader& r) {
  FeedItem item;
  bool have_guid = false;
  bool have_date = false;
  for (;;) {
    xml::Event e = r.next();
    if (e.kind == xml::EventKind::end_tag) break;
    if (e.kind != xml::EventKind::start_tag) {
      throw ProtocolError("unexpected " + xml::describe(e) + " inside <item>");
    }
    std::string value = r.text_until_end(e.name);
    if (e.name == "title") {
      item.title = std::move(value);
    } else if (e.name == "description") {
      item.description = std::move(value);
    } else if (e.name == "category") {
      item.category = std::move(value);
    } else if (e.name == "author") {
      item.author = std::move(value);
    } else if (e.name == "pubDate") {
      const auto t = parse_rfc822(value);
      if (!t) throw ProtocolError("bad pubDate '" + value + "'");
      item.published = *t;
      have_date = true;
    } else if (e.name == "guid") {
      item.guid = MessageId{detail::parse_number<std::int64_t>(value, "guid")};
      have_guid = true;
    } else {
      throw ProtocolError("unexpected <" + e.name + "> in <item>");
    }
  }
  if (!have_guid || !have_date) throw ProtocolError("<item> without guid or pubDate");
  return item;
}

}  // namespace

FeedItem feed_item(const Message& msg) {
  return FeedItem{
      .title = msg.title,
      .description = msg.body,
      .category = msg.category,
      .author = msg.author,
      .published = std::chrono::floor<std::chrono::seconds>(msg.created_at),
      .guid = msg.id,
  };
}

std::string encode_rss(const Feed& feed) {
  xml::XmlWriter w;
  w.start("rss", {{"version", "2.0"}});
  w.start("channel");
  w.element("title", feed.info.title);
  w.element("link", feed.info.link);
  w.element("description", feed.info.description);
  for (const auto& item : feed.items) write_item(w, item);
  w.end("channel");
  w.end("rss");
  return w.finish();
}

std::string encode_rss(const FeedInfo& info, std::span<const Message> messages) {
  Feed feed{info, {}};
  feed.items.reserve(messages.size());
  for (const auto& m : messages) feed.items.push_back(feed_item(m));
  return encode_rss(feed);
}

Feed decode_rss(std::string_view bytes) {
  detail::DocReader r(bytes);
  const xml::Event root = r.expect_start("rss");
  if (detail::require_attr(root, "version") != "2.0") throw ProtocolError("not RSS 2.0");
  r.expect_start("channel");
  Feed feed;
  for (;;) {
    xml::Event e = r.next();
    if (e.kind == xml::EventKind::end_tag) break;
    if (e.kind != xml::EventKind::start_tag) {
      throw ProtocolError("unexpected " + xml::describe(e) + " inside <channel>");
    }
    if (e.name == "item") {
      feed.items.push_back(read_item(r));
    } else if (e.name == "title") {
      feed.info.title = r.text_until_end("title");
    } else if (e.name == "link") {
      feed.info.link = r.text_until_end("link");
    } else if (e.name == "description") {
      feed.info.description = r.text_until_end("description");
    } else {
      throw ProtocolError("unexpected <" + e.name + "> in <channel>");
    }
  }
  xml::Event close = r.next();
  if (close.kind != xml::EventKind::end_tag) throw ProtocolError("content after <channel>");
  r.expect_end_document();
  return feed;
}

}  // namespace newsroom::wire
