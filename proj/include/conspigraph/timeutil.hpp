#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "conspigraph/common.hpp"

namespace conspigraph::timeutil {

/// Parses ISO-8601 timestamps: `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS[.fff]]`
/// with an optional `Z` or `±HH[:MM]` suffix; a space may replace `T`.
/// Fractional seconds are truncated. Result is UTC.
std::optional<UtcTime> parse_iso8601(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_iso8601(UtcTime t);

/// `YYYY-MM-DD` of the UTC day containing t.
std::string format_date(UtcTime t);

/// Days since 1970-01-01 (floor).
std::int64_t day_number(UtcTime t);
std::string format_day_number(std::int64_t day);

}  // namespace conspigraph::timeutil
