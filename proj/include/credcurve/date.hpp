/**
 * @file date.hpp
 * @brief Calendar date with ISO-8601 parsing and ACT/365 year fractions
 */

#pragma once

#include <charconv>
#include <chrono>
#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "credcurve/error.hpp"

namespace credcurve {

/// Calendar date stored as days since 1970-01-01.
class Date {
public:
    constexpr Date() = default;

    static Date from_ymd(int y, unsigned m, unsigned d) {
        using namespace std::chrono;
        year_month_day ymd{year{y}, month{m}, day{d}};
        require(ymd.ok(), ErrorCode::domain, "invalid calendar date");
        return Date(sys_days{ymd}.time_since_epoch().count());
    }

    static constexpr Date from_serial(int days) { return Date(days); }

    /// Parses YYYY-MM-DD.
    static Date parse(std::string_view text) {
        auto field = [&](std::size_t pos, std::size_t len) {
            int value = 0;
            auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
            if (ec != std::errc{} || ptr != text.data() + pos + len)
                fail(ErrorCode::parse, "bad date '" + std::string(text) + "'");
            return value;
        };
        if (text.size() != 10 || text[4] != '-' || text[7] != '-')
            fail(ErrorCode::parse, "bad date '" + std::string(text) + "'");
        int y = field(0, 4), m = field(5, 2), d = field(8, 2);
        if (m < 1 || m > 12 || d < 1 || d > 31)
            fail(ErrorCode::parse, "bad date '" + std::string(text) + "'");
        using namespace std::chrono;
        year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
        if (!ymd.ok()) fail(ErrorCode::parse, "bad date '" + std::string(text) + "'");
        return Date(sys_days{ymd}.time_since_epoch().count());
    }

    constexpr int serial() const { return days_; }

    std::chrono::year_month_day ymd() const {
        return std::chrono::year_month_day{std::chrono::sys_days{std::chrono::days{days_}}};
    }

    /// Shifts by whole months, clamping the day to the end of the target month.
    Date add_months(int months) const {
        using namespace std::chrono;
        auto d = ymd();
        year_month ym = year_month{d.year(), d.month()} + std::chrono::months{months};
        auto last = year_month_day_last{ym.year(), month_day_last{ym.month()}}.day();
        auto dd = d.day() > last ? last : d.day();
        return Date(sys_days{year_month_day{ym.year(), ym.month(), dd}}.time_since_epoch().count());
    }

    constexpr Date add_days(int n) const { return Date(days_ + n); }

    bool is_weekend() const {
        std::chrono::weekday wd{std::chrono::sys_days{std::chrono::days{days_}}};
        return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
    }

    std::string iso() const {
        auto d = ymd();
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                      static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
        return buf;
    }

    friend constexpr auto operator<=>(Date, Date) = default;
    friend constexpr int operator-(Date a, Date b) { return a.days_ - b.days_; }

private:
    constexpr explicit Date(int days) : days_(days) {}
    int days_ = 0;
};

/// ACT/365 fixed year fraction from `from` to `to`.
inline double year_fraction(Date from, Date to) { return (to - from) / 365.0; }

/// Number of weekdays in (from, to].
inline int weekdays_between(Date from, Date to) {
    int count = 0;
    for (Date d = from.add_days(1); d <= to; d = d.add_days(1))
        if (!d.is_weekend()) ++count;
    return count;
}

}  // namespace credcurve
