#include "insight/timefmt.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace insight::timefmt {
namespace {

// Days since 1970-01-01 for a proleptic Gregorian date.
long long days_from_civil(long long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

struct Civil {
  long long year;
  unsigned month;
  unsigned day;
};

Civil civil_from_days(long long z) {
  z += 719468;
  const long long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long long y = static_cast<long long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

unsigned days_in_month(long long y, unsigned m) {
  static constexpr std::array<unsigned, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) return 29;
  return kDays[m - 1];
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool read_digits(std::string_view s, std::size_t& pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += count;
  out = v;
  return true;
}

std::optional<double> unit_seconds(std::string_view unit) {
  const std::string u = lower(unit);
  if (u == "s" || u == "sec" || u == "secs" || u == "second" || u == "seconds") return 1.0;
  if (u == "min" || u == "mins" || u == "minute" || u == "minutes") return kMinute;
  if (u == "h" || u == "hr" || u == "hrs" || u == "hour" || u == "hours") return kHour;
  if (u == "d" || u == "day" || u == "days") return kDay;
  if (u == "w" || u == "week" || u == "weeks") return kWeek;
  if (u == "month" || u == "months") return kMonth;
  if (u == "y" || u == "yr" || u == "yrs" || u == "year" || u == "years") return kYear;
  return std::nullopt;
}

std::optional<double> parse_iso_duration(std::string_view s) {
  bool negative = false;
  if (!s.empty() && s.front() == '-') {
    negative = true;
    s.remove_prefix(1);
  }
  if (s.empty() || (s.front() != 'P' && s.front() != 'p')) return std::nullopt;
  s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  bool in_time = false;
  bool any = false;
  double total = 0.0;
  while (!s.empty()) {
    if (s.front() == 'T' || s.front() == 't') {
      if (in_time) return std::nullopt;
      in_time = true;
      s.remove_prefix(1);
      continue;
    }
    std::size_t n = 0;
    while (n < s.size() && (std::isdigit(static_cast<unsigned char>(s[n])) || s[n] == '.')) ++n;
    if (n == 0 || n == s.size()) return std::nullopt;
    auto value = parse_number(s.substr(0, n));
    if (!value) return std::nullopt;
    const char designator = static_cast<char>(std::toupper(static_cast<unsigned char>(s[n])));
    double unit = 0.0;
    if (!in_time) {
      switch (designator) {
        case 'Y': unit = kYear; break;
        case 'M': unit = kMonth; break;
        case 'W': unit = kWeek; break;
        case 'D': unit = kDay; break;
        default: return std::nullopt;
      }
    } else {
      switch (designator) {
        case 'H': unit = kHour; break;
        case 'M': unit = kMinute; break;
        case 'S': unit = 1.0; break;
        default: return std::nullopt;
      }
    }
    total += *value * unit;
    any = true;
    s.remove_prefix(n + 1);
  }
  if (!any) return std::nullopt;
  return negative ? -total : total;
}

}  // namespace

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<double> parse_iso_datetime(std::string_view s) {
  s = trim(s);
  std::size_t pos = 0;
  int year = 0, month = 0, day = 0;
  if (!read_digits(s, pos, 4, year)) return std::nullopt;
  if (pos >= s.size() || s[pos] != '-') return std::nullopt;
  ++pos;
  if (!read_digits(s, pos, 2, month)) return std::nullopt;
  if (pos >= s.size() || s[pos] != '-') return std::nullopt;
  ++pos;
  if (!read_digits(s, pos, 2, day)) return std::nullopt;
  if (month < 1 || month > 12 || day < 1 || static_cast<unsigned>(day) > days_in_month(year, month)) {
    return std::nullopt;
  }
  double seconds = static_cast<double>(days_from_civil(year, month, day)) * kDay;
  if (pos == s.size()) return seconds;
  if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
  ++pos;
  int hh = 0, mm = 0, ss = 0;
  if (!read_digits(s, pos, 2, hh)) return std::nullopt;
  if (pos >= s.size() || s[pos] != ':') return std::nullopt;
  ++pos;
  if (!read_digits(s, pos, 2, mm)) return std::nullopt;
  double fraction = 0.0;
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    if (!read_digits(s, pos, 2, ss)) return std::nullopt;
    if (pos < s.size() && s[pos] == '.') {
      std::size_t start = pos;
      ++pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      auto f = parse_number(std::string("0") + std::string(s.substr(start, pos - start)));
      if (!f) return std::nullopt;
      fraction = *f;
    }
  }
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) ++pos;
  if (pos != s.size()) return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  return seconds + hh * kHour + mm * kMinute + ss + fraction;
}

std::optional<double> parse_datetime_format(std::string_view s, const std::string& format) {
  std::tm tm{};
  tm.tm_mday = 1;
  std::istringstream in{std::string(trim(s))};
  in >> std::get_time(&tm, format.c_str());
  if (in.fail()) return std::nullopt;
  in >> std::ws;
  if (!in.eof()) return std::nullopt;
  const long long year = tm.tm_year + 1900LL;
  const unsigned month = static_cast<unsigned>(tm.tm_mon + 1);
  const unsigned day = static_cast<unsigned>(tm.tm_mday);
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) return std::nullopt;
  return static_cast<double>(days_from_civil(year, month, day)) * kDay + tm.tm_hour * kHour +
         tm.tm_min * kMinute + tm.tm_sec;
}

std::optional<double> parse_duration(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == 'P' || s.front() == 'p' || (s.size() > 1 && s[0] == '-' && (s[1] == 'P' || s[1] == 'p'))) {
    return parse_iso_duration(s);
  }
  std::size_t n = 0;
  while (n < s.size() && !std::isspace(static_cast<unsigned char>(s[n])) &&
         !std::isalpha(static_cast<unsigned char>(s[n]))) {
    ++n;
  }
  auto value = parse_number(s.substr(0, n));
  if (!value) return std::nullopt;
  auto unit = unit_seconds(trim(s.substr(n)));
  if (!unit) return std::nullopt;
  return *value * *unit;
}

std::optional<bool> parse_bool(std::string_view s) {
  const std::string v = lower(trim(s));
  if (v == "true" || v == "yes") return true;
  if (v == "false" || v == "no") return false;
  return std::nullopt;
}

bool is_null_token(std::string_view s) {
  s = trim(s);
  return s.empty() || s == "NA" || s == "N/A" || s == "NaN" || s == "nan" || s == "null" || s == "NULL" ||
         s == "None";
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string format_datetime(double epoch_seconds) {
  const double day_start = std::floor(epoch_seconds / kDay);
  const Civil c = civil_from_days(static_cast<long long>(day_start));
  double rem = epoch_seconds - day_start * kDay;
  char buf[64];
  if (rem == 0.0) {
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", c.year, c.month, c.day);
    return buf;
  }
  const int hh = static_cast<int>(rem / kHour);
  rem -= hh * kHour;
  const int mm = static_cast<int>(rem / kMinute);
  rem -= mm * kMinute;
  const int ss = static_cast<int>(rem);
  const double frac = rem - ss;
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02d", c.year, c.month, c.day, hh, mm, ss);
  std::string out = buf;
  if (frac > 0.0) {
    std::snprintf(buf, sizeof buf, "%.6f", frac);
    std::string f = buf + 1;  // drop the leading 0
    while (!f.empty() && f.back() == '0') f.pop_back();
    if (f.size() > 1) out += f;
  }
  return out;
}

std::string format_duration(double seconds) {
  struct Unit {
    double size;
    const char* singular;
    const char* plural;
  };
  static constexpr std::array<Unit, 7> kUnits = {{
      {kYear, "year", "years"},
      {kMonth, "month", "months"},
      {kWeek, "week", "weeks"},
      {kDay, "day", "days"},
      {kHour, "hour", "hours"},
      {kMinute, "minute", "minutes"},
      {1.0, "second", "seconds"},
  }};
  if (seconds == 0.0) return "0 seconds";
  for (const auto& u : kUnits) {
    const double n = seconds / u.size;
    if (u.size > 1.0 && (n != std::floor(n))) continue;
    if (u.size > 1.0 && std::abs(n) * u.size != std::abs(seconds)) continue;
    return format_number(n) + " " + (std::abs(n) == 1.0 ? u.singular : u.plural);
  }
  return format_number(seconds) + " seconds";
}

std::optional<TimeAttribute> parse_time_attribute(std::string_view s) {
  const std::string v = lower(s);
  if (v == "year") return TimeAttribute::Year;
  if (v == "quarter") return TimeAttribute::Quarter;
  if (v == "month") return TimeAttribute::Month;
  if (v == "day") return TimeAttribute::Day;
  if (v == "weekday") return TimeAttribute::Weekday;
  if (v == "hour") return TimeAttribute::Hour;
  if (v == "minute") return TimeAttribute::Minute;
  if (v == "seconds") return TimeAttribute::Seconds;
  return std::nullopt;
}

std::string_view to_string(TimeAttribute a) {
  switch (a) {
    case TimeAttribute::Year: return "year";
    case TimeAttribute::Quarter: return "quarter";
    case TimeAttribute::Month: return "month";
    case TimeAttribute::Day: return "day";
    case TimeAttribute::Weekday: return "weekday";
    case TimeAttribute::Hour: return "hour";
    case TimeAttribute::Minute: return "minute";
    case TimeAttribute::Seconds: return "seconds";
  }
  return "year";
}

int extract(TimeAttribute a, double epoch_seconds) {
  const double day_start = std::floor(epoch_seconds / kDay);
  const long long days = static_cast<long long>(day_start);
  const Civil c = civil_from_days(days);
  const double rem = epoch_seconds - day_start * kDay;
  switch (a) {
    case TimeAttribute::Year: return static_cast<int>(c.year);
    case TimeAttribute::Quarter: return static_cast<int>((c.month - 1) / 3 + 1);
    case TimeAttribute::Month: return static_cast<int>(c.month);
    case TimeAttribute::Day: return static_cast<int>(c.day);
    case TimeAttribute::Weekday: {
      // 1970-01-01 was a Thursday (4).
      const long long wd = ((days % 7) + 7 + 3) % 7;  // 0 = Monday
      return static_cast<int>(wd) + 1;
    }
    case TimeAttribute::Hour: return static_cast<int>(rem / kHour);
    case TimeAttribute::Minute: return static_cast<int>(std::fmod(rem, kHour) / kMinute);
    case TimeAttribute::Seconds: return static_cast<int>(std::fmod(rem, kMinute));
  }
  return 0;
}

}  // namespace insight::timefmt
