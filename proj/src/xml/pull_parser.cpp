#include "newsroom/xml/pull_parser.hpp"

#include <algorithm>

#include "newsroom/core/text.hpp"

namespace newsroom::xml {
namespace {

constexpr std::size_t kMaxEntityLength = 10;  // "&#x10FFFF;" minus one

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_start(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || u >= 0x80;
}

bool is_name_char(char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool all_space(std::string_view s) { return std::all_of(s.begin(), s.end(), is_space); }

}  // namespace

PullParser::PullParser(std::string_view input) : in_(input) {
  if (in_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
}

Event PullParser::next() {
  if (done_) throw std::logic_error("pull parser: next() after end_document");
  if (pending_close_) {
    pending_close_ = false;
    Event e = Event::end(std::move(open_.back()));
    open_.pop_back();
    return e;
  }
  return open_.empty() ? prolog_or_epilog() : content();
}

Event PullParser::prolog_or_epilog() {
  for (;;) {
    skip_whitespace();
    if (at_end()) {
      if (!root_seen_) fail(pos_, "no root element");
      done_ = true;
      return Event::end_document();
    }
    if (starts_with("<!--")) {
      skip_comment();
    } else if (starts_with("<?xml") && !root_seen_) {
      skip_declaration();
    } else if (in_[pos_] == '<' && pos_ + 1 < in_.size() && is_name_start(in_[pos_ + 1])) {
      if (root_seen_) fail(pos_, "content after root element");
      return start_tag();
    } else if (root_seen_) {
      fail(pos_, "content after root element");
    } else {
      fail(pos_, "expected root element");
    }
  }
}

Event PullParser::content() {
  // Text runs may be interrupted by comments; the pieces are joined.
  std::string text;
  bool significant = false;
  for (;;) {
    const std::size_t lt = in_.find('<', pos_);
    const std::size_t stop = lt == std::string_view::npos ? in_.size() : lt;
    if (stop > pos_) {
      const auto raw = in_.substr(pos_, stop - pos_);
      if (!all_space(raw)) significant = true;
      text += decode(pos_, stop);
      pos_ = stop;
    }
    if (at_end()) fail(pos_, "unexpected end of input inside <" + open_.back() + ">");
    if (starts_with("<!--")) {
      skip_comment();
      continue;
    }
    break;
  }
  if (significant) return Event::text(std::move(text));

  if (starts_with("</")) return end_tag();
  if (starts_with("<!")) fail(pos_, "CDATA and DOCTYPE are not supported");
  if (starts_with("<?")) fail(pos_, "processing instructions are not supported");
  return start_tag();
}

Event PullParser::start_tag() {
  const std::size_t tag_start = pos_;
  ++pos_;  // '<'
  std::string name = read_name();
  std::vector<Attribute> attributes;
  for (;;) {
    const std::size_t before_space = pos_;
    skip_whitespace();
    if (at_end()) fail(tag_start, "unterminated start tag <" + name + ">");
    if (in_[pos_] == '>') {
      ++pos_;
      break;
    }
    if (starts_with("/>")) {
      pos_ += 2;
      pending_close_ = true;
      break;
    }
    if (pos_ == before_space) fail(pos_, "expected whitespace before attribute");
    const std::size_t attr_start = pos_;
    std::string attr_name = read_name();
    skip_whitespace();
    if (at_end() || in_[pos_] != '=') fail(pos_, "expected '=' after attribute name");
    ++pos_;
    skip_whitespace();
    if (at_end() || (in_[pos_] != '"' && in_[pos_] != '\'')) {
      fail(pos_, "expected quoted attribute value");
    }
    const char quote = in_[pos_++];
    const std::size_t value_start = pos_;
    const std::size_t close = in_.find(quote, pos_);
    if (close == std::string_view::npos) fail(tag_start, "unterminated attribute value");
    const auto lt = in_.substr(value_start, close - value_start).find('<');
    if (lt != std::string_view::npos) fail(value_start + lt, "'<' in attribute value");
    std::string value = decode(value_start, close);
    pos_ = close + 1;
    for (const auto& a : attributes) {
      if (a.name == attr_name) fail(attr_start, "duplicate attribute " + attr_name);
    }
    attributes.push_back({std::move(attr_name), std::move(value)});
  }
  root_seen_ = true;
  open_.push_back(name);
  return Event::start(std::move(name), std::move(attributes));
}

Event PullParser::end_tag() {
  const std::size_t tag_start = pos_;
  pos_ += 2;  // "</"
  std::string name = read_name();
  skip_whitespace();
  if (at_end() || in_[pos_] != '>') fail(tag_start, "unterminated end tag </" + name + ">");
  ++pos_;
  if (name != open_.back()) {
    fail(tag_start, "end tag </" + name + "> does not match <" + open_.back() + ">");
  }
  open_.pop_back();
  return Event::end(std::move(name));
}

void PullParser::skip_comment() {
  const std::size_t start = pos_;
  const std::size_t close = in_.find("-->", pos_ + 4);
  if (close == std::string_view::npos) fail(start, "unterminated comment");
  check_utf8(start, close);
  pos_ = close + 3;
}

void PullParser::skip_declaration() {
  const std::size_t start = pos_;
  const std::size_t close = in_.find("?>", pos_);
  if (close == std::string_view::npos) fail(start, "unterminated XML declaration");
  check_utf8(start, close);
  pos_ = close + 2;
}

void PullParser::skip_whitespace() {
  while (!at_end() && is_space(in_[pos_])) ++pos_;
}

std::string PullParser::read_name() {
  const std::size_t start = pos_;
  if (at_end() || !is_name_start(in_[pos_])) fail(pos_, "expected a name");
  while (!at_end() && is_name_char(in_[pos_])) ++pos_;
  check_utf8(start, pos_);
  return std::string(in_.substr(start, pos_ - start));
}

std::string PullParser::decode(std::size_t begin, std::size_t end) {
  check_utf8(begin, end);
  std::string out;
  out.reserve(end - begin);
  std::size_t i = begin;
  while (i < end) {
    const char c = in_[i];
    if (c != '&') {
      out.push_back(c);
      ++i;
      continue;
    }
    // Bounded search keeps runs of bare '&' linear.
    const std::size_t window = std::min(end - i, kMaxEntityLength + 1);
    const std::size_t rel = in_.substr(i, window).find(';');
    if (rel == std::string_view::npos) fail(i, "unterminated entity reference");
    const std::size_t semi = i + rel;
    const auto ref = in_.substr(i + 1, semi - i - 1);
    if (ref == "amp") {
      out.push_back('&');
    } else if (ref == "lt") {
      out.push_back('<');
    } else if (ref == "gt") {
      out.push_back('>');
    } else if (ref == "quot") {
      out.push_back('"');
    } else if (ref == "apos") {
      out.push_back('\'');
    } else if (ref.size() >= 2 && ref[0] == '#') {
      const bool hex = ref[1] == 'x';
      const auto digits = ref.substr(hex ? 2 : 1);
      if (digits.empty()) fail(i, "empty character reference");
      char32_t cp = 0;
      for (char d : digits) {
        int v;
        if (d >= '0' && d <= '9') {
          v = d - '0';
        } else if (hex && d >= 'a' && d <= 'f') {
          v = d - 'a' + 10;
        } else if (hex && d >= 'A' && d <= 'F') {
          v = d - 'A' + 10;
        } else {
          fail(i, "bad character reference");
        }
        cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
        if (cp > 0x10FFFF) fail(i, "character reference out of range");
      }
      if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) fail(i, "invalid character reference");
      text::append_utf8(out, cp);
    } else {
      fail(i, "unknown entity &" + std::string(ref) + ";");
    }
    i = semi + 1;
  }
  return out;
}

void PullParser::check_utf8(std::size_t begin, std::size_t end) const {
  if (auto bad = text::find_invalid_utf8(in_.substr(begin, end - begin))) {
    throw XmlError(XmlError::Kind::utf8, begin + *bad, "invalid UTF-8");
  }
}

void PullParser::fail(std::size_t at, const std::string& what) const {
  throw XmlError(XmlError::Kind::malformed, std::min(at, in_.size()), what);
}

bool PullParser::starts_with(std::string_view token) const {
  return in_.substr(pos_, token.size()) == token;
}

std::vector<Event> parse_document(std::string_view input) {
  PullParser parser(input);
  std::vector<Event> events;
  do {
    events.push_back(parser.next());
  } while (!parser.done());
  return events;
}

}  // namespace newsroom::xml
