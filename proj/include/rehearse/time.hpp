#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rehearse {

// UTC epoch milliseconds.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecond = 1000;
inline constexpr Timestamp kMinute = 60 * kSecond;
inline constexpr Timestamp kHour = 60 * kMinute;
inline constexpr Timestamp kDay = 24 * kHour;

// Calendar day as days since 1970-01-01 in the given IANA zone.
using DayNumber = std::int64_t;

DayNumber local_day(Timestamp ts, std::string_view tz_name);

// Hour of day [0, 24) in the given zone.
int local_hour(Timestamp ts, std::string_view tz_name);

// "YYYY-MM-DD" for a day number.
std::string format_day(DayNumber day);

// True when `tz_name` resolves against the system zoneinfo database.
bool is_known_time_zone(std::string_view tz_name);

}  // namespace rehearse
