#include "revpanel/calendar.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

namespace revpanel {

namespace chr = std::chrono;

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Date make_date(int y, unsigned m, unsigned d) {
    return Date{chr::year{y} / chr::month{m} / chr::day{d}};
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(m)},
                            chr::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

std::string format_date(Date d) {
    chr::year_month_day ymd{d};
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

int iso_weekday(Date d) {
    return static_cast<int>(chr::weekday{d}.iso_encoding());
}

std::optional<WeekConvention> parse_week_convention(std::string_view text) {
    if (text == "iso") return WeekConvention::Iso;
    if (text == "friday") return WeekConvention::FridayTrading;
    return std::nullopt;
}

std::string_view to_string(WeekConvention c) {
    return c == WeekConvention::Iso ? "iso" : "friday";
}

std::int64_t WeekIndex::ordinal() const {
    // 1970-01-01 is a Thursday, so Mondays sit at day -3 + 7k.
    return floor_div(monday().time_since_epoch().count() + 3, 7);
}

Date WeekIndex::monday() const {
    Date jan4 = make_date(year, 1, 4);
    Date week1 = jan4 - chr::days{iso_weekday(jan4) - 1};
    return week1 + chr::days{7 * (week - 1)};
}

WeekIndex WeekIndex::from_ordinal(std::int64_t ordinal) {
    Date monday{chr::days{ordinal * 7 - 3}};
    return assign_week(monday, WeekConvention::Iso);
}

WeekIndex assign_week(Date date, WeekConvention convention) {
    if (convention == WeekConvention::FridayTrading) {
        // Saturday..Friday maps forward onto its Friday.
        int wd = iso_weekday(date);
        int to_friday = (5 - wd + 7) % 7;
        date += chr::days{to_friday};
    }
    Date thursday = date + chr::days{4 - iso_weekday(date)};
    chr::year_month_day ymd{thursday};
    int iso_year = static_cast<int>(ymd.year());
    Date jan1 = make_date(iso_year, 1, 1);
    int week = static_cast<int>((thursday - jan1).count() / 7) + 1;
    return WeekIndex{iso_year, week};
}

Date week_first_day(WeekIndex week, WeekConvention convention) {
    Date monday = week.monday();
    return convention == WeekConvention::Iso ? monday : monday - chr::days{2};
}

Date week_last_day(WeekIndex week, WeekConvention convention) {
    return week_first_day(week, convention) + chr::days{6};
}

Quarter Quarter::from_ordinal(std::int64_t ordinal) {
    return Quarter{static_cast<int>(floor_div(ordinal, 4)),
                   static_cast<int>(ordinal - floor_div(ordinal, 4) * 4) + 1};
}

Date Quarter::first_day() const {
    return make_date(year, static_cast<unsigned>(3 * (q - 1) + 1), 1);
}

Date Quarter::last_day() const {
    return from_ordinal(ordinal() + 1).first_day() - chr::days{1};
}

std::optional<Quarter> parse_quarter(std::string_view text) {
    if (text.size() < 6) return std::nullopt;
    int y = 0;
    if (!parse_int(text.substr(0, 4), y)) return std::nullopt;
    std::string_view rest = text.substr(4);
    if (!rest.empty() && rest.front() == '-') rest.remove_prefix(1);
    if (rest.size() != 2 || (rest[0] != 'Q' && rest[0] != 'q')) return std::nullopt;
    int q = rest[1] - '0';
    if (q < 1 || q > 4) return std::nullopt;
    return Quarter{y, q};
}

std::string format_quarter(Quarter q) {
    return fmt::format("{:04d}Q{}", q.year, q.q);
}

Quarter quarter_of(Date d) {
    chr::year_month_day ymd{d};
    int m = static_cast<int>(static_cast<unsigned>(ymd.month()));
    return Quarter{static_cast<int>(ymd.year()), (m - 1) / 3 + 1};
}

Date Month::first_day() const {
    return make_date(year, static_cast<unsigned>(month), 1);
}

Date Month::last_day() const {
    chr::year_month_day_last last{chr::year{year} / chr::month{static_cast<unsigned>(month)} /
                                  chr::last};
    return Date{last};
}

std::optional<Month> parse_month(std::string_view text) {
    if (text.size() != 7 || text[4] != '-') return std::nullopt;
    int y = 0, m = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m)) return std::nullopt;
    if (m < 1 || m > 12) return std::nullopt;
    return Month{y, m};
}

std::string format_month(Month m) {
    return fmt::format("{:04d}-{:02d}", m.year, m.month);
}

}  // namespace revpanel
