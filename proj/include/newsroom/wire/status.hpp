#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "newsroom/core/model.hpp"

namespace newsroom::wire {

enum class StatusCode { ok, error };

/// Outcome document returned by mutating endpoints and by every error
/// response:
///
///   <status code="error"><message>..</message><field name=".." reason=".."></field>*</status>
struct StatusPayload {
  StatusCode code = StatusCode::ok;
  std::string message;
  std::vector<FieldError> detail;  // always empty when code == ok

  static StatusPayload ok(std::string message) { return {StatusCode::ok, std::move(message), {}}; }
  static StatusPayload error(std::string message, std::vector<FieldError> detail = {}) {
    return {StatusCode::error, std::move(message), std::move(detail)};
  }

  friend bool operator==(const StatusPayload&, const StatusPayload&) = default;
};

/// Throws std::invalid_argument for an ok payload carrying field detail.
std::string encode_status(const StatusPayload& status);
/// Throws ProtocolError for unknown codes or unexpected elements.
StatusPayload decode_status(std::string_view bytes);

}  // namespace newsroom::wire
