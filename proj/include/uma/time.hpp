#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace uma {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

/// Parses an RFC 3339 timestamp ("2026-01-01T00:00:00Z" or with a
/// numeric offset). Fractional seconds are accepted and truncated.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// Formats as UTC with a trailing 'Z', second precision.
std::string format_rfc3339(Timestamp t);

/// Wall clock, for server code only; library code takes injected times.
Timestamp now_utc();

}  // namespace uma
