#include "emakit/timeutil.hpp"

#include <cstdio>

#include "emakit/errors.hpp"

namespace emakit {

std::int64_t days_from_civil(int year, int month, int day) {
  year -= month <= 2;
  const std::int64_t era = (year >= 0 ? year : year - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(year - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(month + (month > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(day) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t days, int& year, int& month, int& day) {
  days += 719468;
  const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  year = static_cast<int>(y + (month <= 2));
}

Minutes make_minutes(int year, int month, int day, int hour, int minute) {
  return days_from_civil(year, month, day) * kMinutesPerDay + hour * 60 + minute;
}

Minutes parse_iso_minutes(const std::string& text) {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  const int matched =
      std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d", &year, &month, &day, &hour, &minute, &second);
  if (matched < 5 || month < 1 || month > 12 || day < 1 || day > 31 || hour < 0 || hour > 23 ||
      minute < 0 || minute > 59) {
    throw DataError("invalid timestamp '" + text + "' (expected YYYY-MM-DDTHH:MM)");
  }
  return make_minutes(year, month, day, hour, minute);
}

std::string format_iso_minutes(Minutes t) {
  std::int64_t days = t / kMinutesPerDay;
  std::int64_t rem = t % kMinutesPerDay;
  if (rem < 0) {
    rem += kMinutesPerDay;
    days -= 1;
  }
  int year = 0, month = 0, day = 0;
  civil_from_days(days, year, month, day);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d", year, month, day,
                static_cast<int>(rem / 60), static_cast<int>(rem % 60));
  return buf;
}

}  // namespace emakit
