#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace newsroom {

/// UTC instant at millisecond resolution. All stored and transmitted
/// timestamps use this resolution.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

Timestamp now_utc();

/// `2026-10-15T09:30:00.250Z`. Milliseconds are always written.
std::string format_rfc3339(Timestamp t);

/// Accepts `YYYY-MM-DDTHH:MM:SS[.fff...]Z` or a `+HH:MM`/`-HH:MM` offset.
/// Fractions beyond milliseconds are truncated.
std::optional<Timestamp> parse_rfc3339(std::string_view s);

/// `Thu, 15 Oct 2026 09:30:00 GMT`, as RSS 2.0 expects. Seconds resolution.
std::string format_rfc822(Timestamp t);
std::optional<Timestamp> parse_rfc822(std::string_view s);

}  // namespace newsroom
