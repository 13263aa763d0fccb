#pragma once

#include <optional>
#include <string>
#include <string_view>

// Parsing and rendering of cell literals. Datetimes are seconds since the Unix
// epoch (UTC), timedeltas are seconds. Months count as 30 days, years as 365.
namespace insight::timefmt {

inline constexpr double kMinute = 60.0;
inline constexpr double kHour = 3600.0;
inline constexpr double kDay = 86400.0;
inline constexpr double kWeek = 7 * kDay;
inline constexpr double kMonth = 30 * kDay;
inline constexpr double kYear = 365 * kDay;

/// Full-string decimal parse ("12", "-3.5e2"). Rejects trailing garbage.
std::optional<double> parse_number(std::string_view s);

/// ISO-8601 date or date-time: YYYY-MM-DD[( |T)HH:MM[:SS[.fff]]][Z].
std::optional<double> parse_iso_datetime(std::string_view s);

/// Datetime with a strptime-style format (%Y %m %d %H %M %S ...).
std::optional<double> parse_datetime_format(std::string_view s, const std::string& format);

/// "<n> <unit>" literal ("6 months", "1 year", "90 s") or ISO-8601 duration ("P1Y2M", "PT5M").
std::optional<double> parse_duration(std::string_view s);

/// true/false, yes/no (case-insensitive).
std::optional<bool> parse_bool(std::string_view s);

/// Tokens treated as a missing cell.
bool is_null_token(std::string_view s);

/// Shortest representation that parses back to the same double.
std::string format_number(double v);

/// "YYYY-MM-DD" at midnight, otherwise "YYYY-MM-DDTHH:MM:SS[.ffffff]".
std::string format_datetime(double epoch_seconds);

/// Largest unit that divides the value exactly: "1 year", "6 months", "90 seconds".
std::string format_duration(double seconds);

enum class TimeAttribute { Year, Quarter, Month, Day, Weekday, Hour, Minute, Seconds };

std::optional<TimeAttribute> parse_time_attribute(std::string_view s);
std::string_view to_string(TimeAttribute a);

/// Calendar attribute of an epoch timestamp (weekday: Monday = 1 ... Sunday = 7).
int extract(TimeAttribute a, double epoch_seconds);

}  // namespace insight::timefmt
