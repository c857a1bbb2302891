#include "ebprof/timeutil.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace ebprof {

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (text[i] < '0' || text[i] > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return ec == std::errc{} && ptr == text.data() + pos + len;
}

std::optional<CivilDay> checked_day(int y, int m, int d) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd}.time_since_epoch().count();
}

} // namespace

CivilDay make_day(int y, unsigned m, unsigned d) {
    using namespace std::chrono;
    return sys_days{year_month_day{year{y}, month{m}, day{d}}}.time_since_epoch().count();
}

std::optional<CivilDay> parse_date(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d)) {
        return std::nullopt;
    }
    return checked_day(y, m, d);
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    if (text.size() != 16 && text.size() != 19) return std::nullopt;
    if (text[10] != ' ' && text[10] != 'T') return std::nullopt;
    auto day = parse_date(text.substr(0, 10));
    if (!day) return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (text[13] != ':' || !read_int(text, 11, 2, hh) || !read_int(text, 14, 2, mm)) {
        return std::nullopt;
    }
    if (text.size() == 19 && (text[16] != ':' || !read_int(text, 17, 2, ss))) return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    return *day * kSecondsPerDay + hh * kSecondsPerHour + mm * 60 + ss;
}

std::string format_date(CivilDay day) {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{days{day}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_month(CivilDay day) {
    return format_date(day).substr(0, 7);
}

std::string format_timestamp(Timestamp t) {
    const CivilDay day = day_of(t);
    const std::int64_t rem = t - day * kSecondsPerDay;
    char buf[16];
    std::snprintf(buf, sizeof buf, " %02d:%02d:%02d", static_cast<int>(rem / 3600),
                  static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
    return format_date(day) + buf;
}

} // namespace ebprof
