#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "newsroom/xml/event.hpp"

namespace newsroom::xml {

/// Writes events in canonical form: double-quoted attributes, all five
/// predefined entities escaped in text and attribute values, and explicit
/// end tags (never `<a/>`). No XML declaration is emitted.
///
/// Whitespace-only text is written with its first character as a numeric
/// reference so that a pull parser does not drop it.
class XmlWriter {
 public:
  void write(const Event& e);

  void start(std::string_view name, const std::vector<Attribute>& attributes = {});
  void text(std::string_view content);
  void end(std::string_view name);
  /// `<name>content</name>`.
  void element(std::string_view name, std::string_view content,
               const std::vector<Attribute>& attributes = {});

  std::size_t depth() const { return open_.size(); }
  const std::string& bytes() const { return out_; }

  /// Returns the document; throws NestingError if elements remain open.
  std::string finish();

 private:
  std::string out_;
  std::vector<std::string> open_;
  bool root_written_ = false;
};

std::string write_document(const std::vector<Event>& events);

void escape_into(std::string& out, std::string_view raw);

}  // namespace newsroom::xml
