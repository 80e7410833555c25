#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include "pbrs/error.hpp"

namespace pbrs {

// Civil-date conversions for proleptic Gregorian UTC, no locale, no TZ.
inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 +
                       static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

// "YYYY-MM-DDTHH:MM:SSZ" -> UTC seconds. Throws Error on malformed input;
// callers that track line numbers wrap it into ParseError.
inline std::int64_t parse_iso8601(const std::string& text) {
  int y, mo, d, h, mi, s;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &s,
                  &tail) != 7 ||
      tail != 'Z' || text.size() != 20)
    throw Error("timestamp not ISO-8601 UTC (YYYY-MM-DDTHH:MM:SSZ): '" + text + "'");
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60 || h < 0 ||
      mi < 0 || s < 0)
    throw Error("timestamp field out of range: '" + text + "'");
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

inline std::string format_iso8601(std::int64_t ts) {
  std::int64_t z = ts / 86400;
  std::int64_t rem = ts % 86400;
  if (rem < 0) {
    rem += 86400;
    --z;
  }
  int y, m, d;
  civil_from_days(z, y, m, d);
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02lld:%02lld:%02lldZ", y, m, d,
                static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

// Day index (days since epoch) -> "YYYY-MM-DD".
inline std::string format_iso_date(std::int64_t day) {
  int y, m, d;
  civil_from_days(day, y, m, d);
  char buf[12];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return buf;
}

// "YYYY-MM-DD" -> day index.
inline std::int64_t parse_iso_date(const std::string& text) {
  int y, mo, d;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2d", &y, &mo, &d) != 3 || text.size() != 10)
    throw Error("date not YYYY-MM-DD: '" + text + "'");
  return days_from_civil(y, mo, d);
}

}  // namespace pbrs
