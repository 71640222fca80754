#include "newsroom/wire/status.hpp"

#include <stdexcept>

#include "newsroom/wire/news_xml.hpp"
#include "newsroom/xml/writer.hpp"
#include "reader.hpp"

namespace newsroom::wire {

std::string encode_status(const StatusPayload& status) {
  if (status.code == StatusCode::ok && !status.detail.empty()) {
    throw std::invalid_argument("an ok status carries no field detail");
  }
  xml::XmlWriter w;
  w.start("status", {{"code", status.code == StatusCode::ok ? "ok" : "error"}});
  w.element("message", status.message);
  for (const auto& f : status.detail) {
    w.start("field", {{"name", f.field}, {"reason", f.reason}});
    w.end("field");
  }
  w.end("status");
  return w.finish();
}

StatusPayload decode_status(std::string_view bytes) {
  detail::DocReader r(bytes);
  const xml::Event root = r.expect_start("status");
  StatusPayload status;
  const std::string& code = detail::require_attr(root, "code");
  if (code == "ok") {
    status.code = StatusCode::ok;
  } else if (code == "error") {
    status.code = StatusCode::error;
  } else {
    throw ProtocolError("unknown status code '" + code + "'");
  }

  bool have_message = false;
  for (;;) {
    xml::Event e = r.next();
    if (e.kind == xml::EventKind::end_tag) break;
    if (e.kind != xml::EventKind::start_tag) {
      throw ProtocolError("unexpected " + xml::describe(e) + " inside <status>");
    }
    if (e.name == "message") {
      if (have_message) throw ProtocolError("duplicate <message> in <status>");
      have_message = true;
      status.message = r.text_until_end("message");
    } else if (e.name == "field") {
      status.detail.push_back({detail::require_attr(e, "name"), detail::require_attr(e, "reason")});
      r.expect_empty("field");
    } else {
      throw ProtocolError("unexpected <" + e.name + "> in <status>");
    }
  }
  r.expect_end_document();
  if (!have_message) throw ProtocolError("missing <message> in <status>");
  if (status.code == StatusCode::ok && !status.detail.empty()) {
    throw ProtocolError("ok status with field detail");
  }
  return status;
}

}  // namespace newsroom::wire
