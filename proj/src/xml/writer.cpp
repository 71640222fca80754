#include "newsroom/xml/writer.hpp"

#include <algorithm>

namespace newsroom::xml {
namespace {

bool valid_name(std::string_view name) {
  if (name.empty()) return false;
  auto start_ok = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' ||
           static_cast<unsigned char>(c) >= 0x80;
  };
  auto char_ok = [&](char c) {
    return start_ok(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
  };
  return start_ok(name.front()) && std::all_of(name.begin() + 1, name.end(), char_ok);
}

void require_name(std::string_view name) {
  if (!valid_name(name)) throw std::invalid_argument("invalid XML name '" + std::string(name) + "'");
}

}  // namespace

void escape_into(std::string& out, std::string_view raw) {
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
}

void XmlWriter::write(const Event& e) {
  switch (e.kind) {
    case EventKind::start_tag: start(e.name, e.attributes); break;
    case EventKind::end_tag: end(e.name); break;
    case EventKind::text: text(e.content); break;
    case EventKind::end_document:
      if (!open_.empty()) throw NestingError("document ended inside <" + open_.back() + ">");
      break;
  }
}

void XmlWriter::start(std::string_view name, const std::vector<Attribute>& attributes) {
  require_name(name);
  if (open_.empty() && root_written_) throw NestingError("second root element <" + std::string(name) + ">");
  root_written_ = true;
  out_.push_back('<');
  out_ += name;
  for (const auto& a : attributes) {
    require_name(a.name);
    out_.push_back(' ');
    out_ += a.name;
    out_ += "=\"";
    escape_into(out_, a.value);
    out_.push_back('"');
  }
  out_.push_back('>');
  open_.emplace_back(name);
}

void XmlWriter::text(std::string_view content) {
  if (content.empty()) return;
  if (open_.empty()) throw NestingError("text outside the root element");
  const bool blank = std::all_of(content.begin(), content.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  });
  if (blank) {
    out_ += "&#" + std::to_string(static_cast<int>(content.front())) + ";";
    content.remove_prefix(1);
  }
  escape_into(out_, content);
}

void XmlWriter::end(std::string_view name) {
  if (open_.empty()) throw NestingError("</" + std::string(name) + "> with no open element");
  if (open_.back() != name) {
    throw NestingError("</" + std::string(name) + "> does not close <" + open_.back() + ">");
  }
  out_ += "</";
  out_ += name;
  out_.push_back('>');
  open_.pop_back();
}

void XmlWriter::element(std::string_view name, std::string_view content,
                        const std::vector<Attribute>& attributes) {
  start(name, attributes);
  text(content);
  end(name);
}

std::string XmlWriter::finish() {
  if (!open_.empty()) throw NestingError("document ended inside <" + open_.back() + ">");
  return std::move(out_);
}

std::string write_document(const std::vector<Event>& events) {
  XmlWriter w;
  for (const auto& e : events) w.write(e);
  return w.finish();
}

}  // namespace newsroom::xml
