#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace cyclemeter {

/// Sample timestamps: UTC, microsecond resolution, exact.
using SampleTime = std::chrono::sys_time<std::chrono::microseconds>;

/// Interpolated instants (cycle boundaries) in fractional seconds since the Unix epoch.
using Seconds = std::chrono::duration<double>;
using Instant = std::chrono::time_point<std::chrono::system_clock, Seconds>;

inline constexpr double kSecondsPerMinute = 60.0;
inline constexpr double kSecondsPerHour = 3600.0;

/// Parses `YYYY-MM-DDTHH:MM:SS[.ffffff](Z|+HH:MM|-HH:MM|+HHMM)`.
/// A space may replace the `T`. Returns nullopt when the text is not an
/// unambiguous absolute instant (including a missing UTC offset).
std::optional<SampleTime> parse_iso8601(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SS[.f]Z`; the fraction is printed only when non-zero,
/// with trailing zeros trimmed.
std::string format_iso8601(SampleTime t);

inline Instant to_instant(SampleTime t) {
  return Instant{std::chrono::duration_cast<Seconds>(t.time_since_epoch())};
}

inline double unix_seconds(Instant t) { return t.time_since_epoch().count(); }

inline Instant instant_from_unix_seconds(double s) { return Instant{Seconds{s}}; }

}  // namespace cyclemeter
