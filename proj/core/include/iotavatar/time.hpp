#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace iotavatar {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// `YYYY-MM-DDTHH:MM:SS.mmmZ`, UTC.
std::string format_iso8601(Timestamp ts);

/// Accepts `YYYY-MM-DDTHH:MM:SS[.fff]Z`.
std::optional<Timestamp> parse_iso8601(std::string_view text);

inline Timestamp now_ms() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

}  // namespace iotavatar
