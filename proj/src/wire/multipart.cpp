#include "newsroom/wire/multipart.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>

namespace newsroom::wire {
namespace {

constexpr std::string_view kCrlf = "\r\n";
constexpr std::string_view kAlphanumerics =
    "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool valid_boundary(std::string_view b) {
  static constexpr std::string_view kExtra = "'()+_,-./:=? ";
  if (b.empty() || b.size() > 70 || b.back() == ' ') return false;
  return std::all_of(b.begin(), b.end(), [](char c) {
    return kAlphanumerics.find(c) != std::string_view::npos ||
           kExtra.find(c) != std::string_view::npos;
  });
}

bool quotable(std::string_view s) {
  return s.find_first_of("\"\r\n") == std::string_view::npos;
}

[[noreturn]] void framing(std::size_t at, const std::string& what) {
  throw MultipartError(MultipartError::Kind::framing, at, what);
}

[[noreturn]] void invalid(const std::string& what) {
  throw MultipartError(MultipartError::Kind::invalid_part, 0, what);
}

void check_parts(const std::vector<FormPart>& parts) {
  if (parts.empty()) invalid("multipart body needs at least one part");
  std::set<std::string_view> names;
  for (const auto& p : parts) {
    if (p.name.empty()) invalid("part without a name");
    if (!quotable(p.name)) invalid("part name cannot be quoted: " + p.name);
    if (p.filename && !quotable(*p.filename)) invalid("filename cannot be quoted: " + *p.filename);
    if (p.content_type && p.content_type->find_first_of("\r\n") != std::string::npos) {
      invalid("content type contains a line break");
    }
    if (!names.insert(p.name).second) invalid("duplicate part name " + p.name);
  }
}

bool collides(const std::vector<FormPart>& parts, std::string_view boundary) {
  return std::any_of(parts.begin(), parts.end(), [&](const FormPart& p) {
    return p.data.find(boundary) != std::string::npos;
  });
}

// Reads `key="value"` or `key=value` parameters of a header value.
std::optional<std::string> header_param(std::string_view value, std::string_view key) {
  std::size_t pos = value.find(';');
  while (pos != std::string_view::npos) {
    std::string_view rest = trim(value.substr(pos + 1));
    const std::size_t eq = rest.find('=');
    if (eq == std::string_view::npos) return std::nullopt;
    const std::string name = lower(trim(rest.substr(0, eq)));
    std::string_view v = rest.substr(eq + 1);
    std::size_t consumed;
    std::string parsed;
    if (!v.empty() && v.front() == '"') {
      const std::size_t close = v.find('"', 1);
      if (close == std::string_view::npos) return std::nullopt;
      parsed = std::string(v.substr(1, close - 1));
      consumed = close + 1;
    } else {
      const std::size_t semi = v.find(';');
      parsed = std::string(trim(v.substr(0, semi)));
      consumed = semi == std::string_view::npos ? v.size() : semi;
    }
    if (name == key) return parsed;
    const std::size_t offset = static_cast<std::size_t>(v.data() - value.data()) + consumed;
    pos = value.find(';', offset);
  }
  return std::nullopt;
}

}  // namespace

MultipartError::MultipartError(Kind kind, std::size_t offset, const std::string& what)
    : std::runtime_error(kind == Kind::framing ? what + " at byte " + std::to_string(offset)
                                               : what),
      kind_(kind),
      offset_(offset) {}

BoundarySource random_boundaries() {
  return [] {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    std::uniform_int_distribution<std::size_t> pick(0, kAlphanumerics.size() - 1);
    std::string b(kBoundaryLength, '0');
    for (auto& c : b) c = kAlphanumerics[pick(rng)];
    return b;
  };
}

EncodedMultipart encode_multipart_with_boundary(const std::vector<FormPart>& parts,
                                                std::string_view boundary) {
  if (!valid_boundary(boundary)) {
    throw std::invalid_argument("invalid multipart boundary '" + std::string(boundary) + "'");
  }
  check_parts(parts);
  if (collides(parts, boundary)) {
    throw MultipartError(MultipartError::Kind::boundary_collision, 0,
                         "boundary occurs in part data");
  }

  std::size_t size = 0;
  for (const auto& p : parts) size += p.data.size() + p.name.size() + 128;
  std::string body;
  body.reserve(size);
  for (const auto& p : parts) {
    body += "--";
    body += boundary;
    body += kCrlf;
    body += "Content-Disposition: form-data; name=\"" + p.name + "\"";
    if (p.filename) body += "; filename=\"" + *p.filename + "\"";
    body += kCrlf;
    if (p.content_type) body += "Content-Type: " + *p.content_type + std::string(kCrlf);
    body += kCrlf;
    body += p.data;
    body += kCrlf;
  }
  body += "--";
  body += boundary;
  body += "--";
  body += kCrlf;
  return {std::string(boundary), std::move(body)};
}

EncodedMultipart encode_multipart(const std::vector<FormPart>& parts,
                                  const BoundarySource& source) {
  check_parts(parts);
  for (int attempt = 0; attempt < kBoundaryAttempts; ++attempt) {
    std::string boundary = source();
    if (!collides(parts, boundary)) return encode_multipart_with_boundary(parts, boundary);
  }
  throw MultipartError(MultipartError::Kind::boundary_collision, 0,
                       "no collision-free boundary after " + std::to_string(kBoundaryAttempts) +
                           " attempts");
}

std::vector<FormPart> decode_multipart(std::string_view boundary, std::string_view body) {
  if (boundary.empty()) framing(0, "empty boundary");
  const std::string delimiter = "--" + std::string(boundary);
  const std::string inner = std::string(kCrlf) + delimiter;

  std::size_t pos;
  if (body.substr(0, delimiter.size()) == delimiter) {
    pos = 0;
  } else {
    const std::size_t first = body.find(inner);
    if (first == std::string_view::npos) framing(0, "no opening boundary delimiter");
    pos = first + 2;
  }

  std::vector<FormPart> parts;
  std::set<std::string> names;
  for (;;) {
    pos += delimiter.size();
    if (body.substr(pos, 2) == "--") return parts;
    while (pos < body.size() && (body[pos] == ' ' || body[pos] == '\t')) ++pos;
    if (body.substr(pos, 2) != kCrlf) framing(pos, "expected CRLF after boundary delimiter");
    pos += 2;

    FormPart part;
    bool have_disposition = false;
    for (;;) {
      const std::size_t eol = body.find(kCrlf, pos);
      if (eol == std::string_view::npos) framing(pos, "unterminated part headers");
      const std::string_view line = body.substr(pos, eol - pos);
      const std::size_t line_start = pos;
      pos = eol + 2;
      if (line.empty()) break;
      const std::size_t colon = line.find(':');
      if (colon == std::string_view::npos) framing(line_start, "malformed part header");
      const std::string name = lower(trim(line.substr(0, colon)));
      const std::string_view value = trim(line.substr(colon + 1));
      if (name == "content-disposition") {
        if (lower(trim(value.substr(0, value.find(';')))) != "form-data") {
          framing(line_start, "part disposition is not form-data");
        }
        auto part_name = header_param(value, "name");
        if (!part_name || part_name->empty()) framing(line_start, "part without a name");
        part.name = std::move(*part_name);
        part.filename = header_param(value, "filename");
        have_disposition = true;
      } else if (name == "content-type") {
        part.content_type = std::string(value);
      }
    }
    if (!have_disposition) framing(pos, "part without Content-Disposition");

    const std::size_t end = body.find(inner, pos);
    if (end == std::string_view::npos) framing(body.size(), "missing closing boundary delimiter");
    part.data = std::string(body.substr(pos, end - pos));
    if (!names.insert(part.name).second) framing(pos, "duplicate part name " + part.name);
    parts.push_back(std::move(part));
    pos = end + 2;
  }
}

std::optional<std::string> boundary_from_content_type(std::string_view content_type) {
  const std::string type = lower(trim(content_type.substr(0, content_type.find(';'))));
  if (type != "multipart/form-data") return std::nullopt;
  auto b = header_param(content_type, "boundary");
  if (!b || b->empty()) return std::nullopt;
  return b;
}

}  // namespace newsroom::wire
