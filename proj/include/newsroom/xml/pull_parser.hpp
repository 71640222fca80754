#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "newsroom/xml/event.hpp"

namespace newsroom::xml {

/// Streaming pull parser over a UTF-8 buffer.
///
/// Supported: elements, attributes, text, the five predefined entities and
/// numeric character references, comments (skipped) and a leading XML
/// declaration (skipped). Not supported: DTDs, CDATA, processing
/// instructions, namespaces. `<a/>` yields a start_tag and an end_tag.
/// Whitespace-only text between tags is dropped.
///
/// The parser keeps an explicit element stack, so nesting depth costs heap
/// memory only. The input buffer must outlive the parser.
class PullParser {
 public:
  explicit PullParser(std::string_view input);

  /// Throws XmlError on malformed input and std::logic_error when called
  /// again after end_document.
  Event next();

  bool done() const { return done_; }
  std::size_t offset() const { return pos_; }
  std::size_t depth() const { return open_.size(); }

 private:
  Event prolog_or_epilog();
  Event content();
  Event start_tag();
  Event end_tag();

  void skip_comment();
  void skip_declaration();
  void skip_whitespace();
  std::string read_name();
  std::string decode(std::size_t begin, std::size_t end);
  void check_utf8(std::size_t begin, std::size_t end) const;

  [[noreturn]] void fail(std::size_t at, const std::string& what) const;

  bool starts_with(std::string_view token) const;
  bool at_end() const { return pos_ >= in_.size(); }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::vector<std::string> open_;
  bool root_seen_ = false;
  bool pending_close_ = false;
  bool done_ = false;
};

/// Runs a parser to completion; the last event is always end_document.
std::vector<Event> parse_document(std::string_view input);

}  // namespace newsroom::xml
