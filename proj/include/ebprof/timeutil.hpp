#ifndef EBPROF_TIMEUTIL_HPP
#define EBPROF_TIMEUTIL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ebprof {

/// Naive local-clock time: seconds since 1970-01-01 00:00 with no timezone attached.
using Timestamp = std::int64_t;
/// Calendar date as days since 1970-01-01.
using CivilDay = std::int64_t;

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

/// Parses `YYYY-MM-DD HH:MM` or `YYYY-MM-DD HH:MM:SS` (a `T` separator is also accepted).
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::optional<CivilDay> parse_date(std::string_view text);

std::string format_timestamp(Timestamp t);
std::string format_date(CivilDay day);
/// `YYYY-MM` for the month containing `day`.
std::string format_month(CivilDay day);

CivilDay make_day(int year, unsigned month, unsigned day);

inline CivilDay day_of(Timestamp t) {
    return t >= 0 ? t / kSecondsPerDay : -((-t + kSecondsPerDay - 1) / kSecondsPerDay);
}

inline int hour_of(Timestamp t) {
    return static_cast<int>((t - day_of(t) * kSecondsPerDay) / kSecondsPerHour);
}

/// 0 = Monday ... 6 = Sunday.
inline int weekday_of(CivilDay day) {
    // 1970-01-01 was a Thursday.
    const std::int64_t w = (day + 3) % 7;
    return static_cast<int>(w < 0 ? w + 7 : w);
}

} // namespace ebprof

#endif
