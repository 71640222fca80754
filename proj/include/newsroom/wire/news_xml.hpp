#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "newsroom/core/model.hpp"

namespace newsroom::wire {

/// A well-formed document that does not have the expected shape.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Segment wire unit:
//
//   <newslist page="1" total="12" more="true">
//     <news id="7">
//       <title>..</title><author>..</author><place>..</place>
//       <category>..</category><body>..</body>
//       <created>2026-10-15T09:30:00.000Z</created><status>active</status>
//       <media count="2" thumb="3"><file id="3" kind="image" format="jpeg" bytes="812"></file></media>
//     </news>
//   </newslist>
//
// `thumb` and the <file> children are optional. Decoders accept attributes
// and child elements in any order, and reject unknown or duplicate children.

std::string encode_result_page(const ResultPage& page);
/// Throws ProtocolError, or xml::XmlError for malformed input.
ResultPage decode_result_page(std::string_view bytes);

/// A complete list (the public viewer) travels as page 1 with more="false".
std::string encode_news_list(const std::vector<NewsItem>& items);

std::string encode_news(const NewsItem& item);
NewsItem decode_news(std::string_view bytes);

/// `<session token=".."></session>`
std::string encode_session(std::string_view token);
std::string decode_session(std::string_view bytes);

/// `<created id=".."></created>`
std::string encode_created(std::int64_t id);
std::int64_t decode_created(std::string_view bytes);

/// `<categories><category>..</category>*</categories>`
std::string encode_categories(const std::vector<std::string>& names);
std::vector<std::string> decode_categories(std::string_view bytes);

}  // namespace newsroom::wire
