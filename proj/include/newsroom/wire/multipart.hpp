#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace newsroom::wire {

/// One multipart/form-data part. `data` is raw bytes.
struct FormPart {
  std::string name;
  std::optional<std::string> filename;
  std::optional<std::string> content_type;
  std::string data;

  friend bool operator==(const FormPart&, const FormPart&) = default;
};

class MultipartError : public std::runtime_error {
 public:
  enum class Kind {
    boundary_collision,  // every candidate boundary occurred in the payload
    framing,             // decode: malformed delimiter, headers or terminator
    invalid_part,        // encode: empty/duplicate names or unquotable values
  };

  MultipartError(Kind kind, std::size_t offset, const std::string& what);

  Kind kind() const { return kind_; }
  /// Byte offset into the body for framing errors, 0 otherwise.
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

struct EncodedMultipart {
  std::string boundary;
  std::string body;

  std::string content_type() const { return "multipart/form-data; boundary=" + boundary; }
};

inline constexpr std::size_t kBoundaryLength = 30;
inline constexpr int kBoundaryAttempts = 8;

using BoundarySource = std::function<std::string()>;

/// 30 random alphanumerics per call, from a per-thread generator.
BoundarySource random_boundaries();

/// Frames `parts` as
///
///   --B CRLF headers CRLF CRLF data CRLF --B ... CRLF --B-- CRLF
///
/// drawing boundaries from `source` until one does not occur in any part,
/// at most kBoundaryAttempts times.
EncodedMultipart encode_multipart(const std::vector<FormPart>& parts,
                                  const BoundarySource& source = random_boundaries());

/// Single attempt with a fixed boundary; throws boundary_collision if the
/// boundary occurs in a part.
EncodedMultipart encode_multipart_with_boundary(const std::vector<FormPart>& parts,
                                                std::string_view boundary);

/// Exact inverse of encode_multipart, including binary data with embedded
/// CRLFs. A preamble before the first delimiter and an epilogue after the
/// terminator are ignored.
std::vector<FormPart> decode_multipart(std::string_view boundary, std::string_view body);

/// Extracts the boundary parameter of a multipart/form-data content type.
std::optional<std::string> boundary_from_content_type(std::string_view content_type);

}  // namespace newsroom::wire
