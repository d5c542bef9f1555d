#pragma once

#include <cstdint>
#include <string>

namespace emakit {

// Instants are minutes since the Unix epoch, timezone-naive.
using Minutes = std::int64_t;

inline constexpr Minutes kMinutesPerDay = 24 * 60;

std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

Minutes make_minutes(int year, int month, int day, int hour, int minute);

// Parses "YYYY-MM-DDTHH:MM" (an optional ":SS" suffix is accepted and
// truncated). Throws DataError on malformed input.
Minutes parse_iso_minutes(const std::string& text);

std::string format_iso_minutes(Minutes t);

}  // namespace emakit
