#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace newsroom::xml {

enum class EventKind { start_tag, end_tag, text, end_document };

struct Attribute {
  std::string name;
  std::string value;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// One pull-parser event. `name` is set for tags, `attributes` for start
/// tags, `content` (entity-decoded) for text.
struct Event {
  EventKind kind = EventKind::end_document;
  std::string name;
  std::vector<Attribute> attributes;
  std::string content;

  static Event start(std::string name, std::vector<Attribute> attributes = {});
  static Event end(std::string name);
  static Event text(std::string content);
  static Event end_document();

  /// Value of the named attribute, or nullptr.
  const std::string* attribute(std::string_view attr_name) const;

  friend bool operator==(const Event&, const Event&) = default;
};

std::string describe(const Event& e);

class XmlError : public std::runtime_error {
 public:
  enum class Kind { malformed, utf8 };

  XmlError(Kind kind, std::size_t offset, const std::string& what);

  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Raised by the writer for an end tag that does not close the innermost
/// open element, or for a document ended with elements still open.
class NestingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace newsroom::xml
