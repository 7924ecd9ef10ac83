#include "rehearse/time.hpp"

#include <absl/time/civil_time.h>
#include <absl/time/time.h>

#include <map>
#include <mutex>

#include "rehearse/error.hpp"

namespace rehearse {

namespace {

// absl::LoadTimeZone hits the filesystem; zones are cached process-wide.
const absl::TimeZone* find_zone(std::string_view name) {
    static std::mutex mu;
    static std::map<std::string, absl::TimeZone, std::less<>> cache;
    const std::lock_guard lock(mu);
    if (auto it = cache.find(name); it != cache.end()) return &it->second;
    absl::TimeZone tz;
    if (!absl::LoadTimeZone(std::string(name), &tz)) return nullptr;
    return &cache.emplace(std::string(name), tz).first->second;
}

const absl::TimeZone& zone_or_throw(std::string_view name) {
    const absl::TimeZone* tz = find_zone(name);
    if (tz == nullptr) throw Error(ErrorCode::InvalidConfig, "unknown time zone '" + std::string(name) + "'");
    return *tz;
}

const absl::CivilDay kEpochDay(1970, 1, 1);

}  // namespace

DayNumber local_day(Timestamp ts, std::string_view tz_name) {
    const auto civil = absl::ToCivilDay(absl::FromUnixMillis(ts), zone_or_throw(tz_name));
    return civil - kEpochDay;
}

int local_hour(Timestamp ts, std::string_view tz_name) {
    return absl::ToCivilHour(absl::FromUnixMillis(ts), zone_or_throw(tz_name)).hour();
}

std::string format_day(DayNumber day) {
    return absl::FormatCivilTime(kEpochDay + day);
}

bool is_known_time_zone(std::string_view tz_name) { return find_zone(tz_name) != nullptr; }

}  // namespace rehearse
