#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace newsroom::text {

/// Offset of the first byte that does not start a valid UTF-8 sequence, or
/// nullopt when the whole input is well-formed. Overlong forms, surrogates
/// and code points above U+10FFFF are rejected.
std::optional<std::size_t> find_invalid_utf8(std::string_view bytes);

inline bool is_valid_utf8(std::string_view bytes) { return !find_invalid_utf8(bytes); }

/// Appends the UTF-8 encoding of `cp` to `out`.
void append_utf8(std::string& out, char32_t cp);

/// Number of code points; invalid bytes count as one each.
std::size_t code_point_count(std::string_view bytes);

/// Simple case fold to lowercase for ASCII, Latin-1, Latin Extended-A, Greek
/// and Cyrillic. Other code points and invalid bytes pass through unchanged.
char32_t fold_code_point(char32_t cp);
std::string fold_case(std::string_view bytes);

bool contains_folded(std::string_view haystack, std::string_view needle);
bool equal_folded(std::string_view a, std::string_view b);

/// Three-way comparison of the folded forms (byte order of the fold).
int compare_folded(std::string_view a, std::string_view b);

std::string to_hex(std::string_view bytes);

}  // namespace newsroom::text
