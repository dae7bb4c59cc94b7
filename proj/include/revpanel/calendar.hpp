#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace revpanel {

using Date = std::chrono::sys_days;

// Strict yyyy-mm-dd. Returns nullopt for anything else, including invalid
// calendar days such as 2015-02-30.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

// Monday = 1 ... Sunday = 7.
int iso_weekday(Date d);

enum class WeekConvention {
    Iso,            // Monday..Sunday, labelled by ISO-8601 year/week
    FridayTrading,  // Saturday..Friday, labelled by the ISO week of the Friday
};

std::optional<WeekConvention> parse_week_convention(std::string_view text);
std::string_view to_string(WeekConvention c);

struct WeekIndex {
    int year = 0;
    int week = 0;  // 1..53

    // Monotone integer position; consecutive weeks differ by exactly 1.
    std::int64_t ordinal() const;
    // Monday of the labelled ISO week.
    Date monday() const;

    static WeekIndex from_ordinal(std::int64_t ordinal);

    auto operator<=>(const WeekIndex&) const = default;
};

WeekIndex assign_week(Date date, WeekConvention convention = WeekConvention::Iso);

// All dates belonging to `week` under `convention` satisfy first <= d <= last.
Date week_first_day(WeekIndex week, WeekConvention convention);
Date week_last_day(WeekIndex week, WeekConvention convention);

struct Quarter {
    int year = 0;
    int q = 1;  // 1..4

    std::int64_t ordinal() const { return static_cast<std::int64_t>(year) * 4 + (q - 1); }
    static Quarter from_ordinal(std::int64_t ordinal);
    Date first_day() const;
    Date last_day() const;

    auto operator<=>(const Quarter&) const = default;
};

// Accepts "2015Q3" (also "2015-Q3", case-insensitive q).
std::optional<Quarter> parse_quarter(std::string_view text);
std::string format_quarter(Quarter q);
Quarter quarter_of(Date d);

// Accepts "2015-07".
struct Month {
    int year = 0;
    int month = 1;
    Date first_day() const;
    Date last_day() const;
    auto operator<=>(const Month&) const = default;
};
std::optional<Month> parse_month(std::string_view text);
std::string format_month(Month m);

}  // namespace revpanel
