#include "newsroom/xml/event.hpp"

namespace newsroom::xml {

Event Event::start(std::string name, std::vector<Attribute> attributes) {
  return {EventKind::start_tag, std::move(name), std::move(attributes), {}};
}

Event Event::end(std::string name) { return {EventKind::end_tag, std::move(name), {}, {}}; }

Event Event::text(std::string content) { return {EventKind::text, {}, {}, std::move(content)}; }

Event Event::end_document() { return {}; }

const std::string* Event::attribute(std::string_view attr_name) const {
  for (const auto& a : attributes) {
    if (a.name == attr_name) return &a.value;
  }
  return nullptr;
}

std::string describe(const Event& e) {
  switch (e.kind) {
    case EventKind::start_tag: return "<" + e.name + ">";
    case EventKind::end_tag: return "</" + e.name + ">";
    case EventKind::text: return "text \"" + e.content.substr(0, 32) + "\"";
    case EventKind::end_document: return "end of document";
  }
  return {};
}

XmlError::XmlError(Kind kind, std::size_t offset, const std::string& what)
    : std::runtime_error(what + " at byte " + std::to_string(offset)),
      kind_(kind),
      offset_(offset) {}

}  // namespace newsroom::xml
