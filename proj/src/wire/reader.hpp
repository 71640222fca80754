#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "newsroom/wire/news_xml.hpp"
#include "newsroom/xml/pull_parser.hpp"

namespace newsroom::wire::detail {

/// Thin cursor over a PullParser for shape-checked decoding.
class DocReader {
 public:
  explicit DocReader(std::string_view bytes) : parser_(bytes) {}

  xml::Event next() { return parser_.next(); }

  xml::Event expect_start(std::string_view name) {
    xml::Event e = parser_.next();
    if (e.kind != xml::EventKind::start_tag || e.name != name) {
      throw ProtocolError("expected <" + std::string(name) + ">, found " + xml::describe(e));
    }
    return e;
  }

  /// Called after <name> was consumed: returns its text and consumes </name>.
  std::string text_until_end(std::string_view name) {
    std::string content;
    for (;;) {
      xml::Event e = parser_.next();
      if (e.kind == xml::EventKind::text) {
        content += e.content;
      } else if (e.kind == xml::EventKind::end_tag) {
        return content;
      } else {
        throw ProtocolError("unexpected " + xml::describe(e) + " inside <" + std::string(name) +
                            ">");
      }
    }
  }

  /// Called after <name> was consumed: requires </name> next.
  void expect_empty(std::string_view name) {
    xml::Event e = parser_.next();
    if (e.kind != xml::EventKind::end_tag) {
      throw ProtocolError("unexpected " + xml::describe(e) + " inside <" + std::string(name) +
                          ">");
    }
  }

  void expect_end_document() {
    xml::Event e = parser_.next();
    if (e.kind != xml::EventKind::end_document) {
      throw ProtocolError("unexpected " + xml::describe(e) + " after root element");
    }
  }

 private:
  xml::PullParser parser_;
};

inline const std::string& require_attr(const xml::Event& e, std::string_view attr) {
  if (const std::string* v = e.attribute(attr)) return *v;
  throw ProtocolError("<" + e.name + "> is missing attribute " + std::string(attr));
}

template <class Int>
Int parse_number(std::string_view s, std::string_view what) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ProtocolError("bad number '" + std::string(s) + "' for " + std::string(what));
  }
  return v;
}

inline bool parse_bool(std::string_view s, std::string_view what) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ProtocolError("bad boolean '" + std::string(s) + "' for " + std::string(what));
}

}  // namespace newsroom::wire::detail
