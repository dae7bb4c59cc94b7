#include <doctest.h>

#include <sstream>

#include "revpanel/calendar.hpp"
#include "revpanel/csv.hpp"
#include "revpanel/utf8.hpp"

using namespace revpanel;

TEST_CASE("dates parse strictly") {
    CHECK(parse_date("2015-01-05").has_value());
    CHECK_FALSE(parse_date("2015-02-30").has_value());
    CHECK_FALSE(parse_date("2015-1-5").has_value());
    CHECK_FALSE(parse_date("2015-01-05 ").has_value());
    CHECK_FALSE(parse_date("").has_value());
    CHECK(format_date(*parse_date("2016-02-29")) == "2016-02-29");
}

TEST_CASE("ISO week assignment") {
    auto w = assign_week(*parse_date("2015-01-05"));
    CHECK(w.year == 2015);
    CHECK(w.week == 2);
    w = assign_week(*parse_date("2016-01-01"));
    CHECK(w.year == 2015);
    CHECK(w.week == 53);
    w = assign_week(*parse_date("2014-12-29"));
    CHECK(w.year == 2015);
    CHECK(w.week == 1);
}

TEST_CASE("dates of one Monday-Sunday span share a week") {
    const Date monday = *parse_date("2015-03-02");
    const auto w = assign_week(monday);
    for (int d = 0; d < 7; ++d) CHECK(assign_week(monday + std::chrono::days(d)) == w);
    CHECK(assign_week(monday + std::chrono::days(7)).ordinal() == w.ordinal() + 1);
    CHECK(assign_week(monday - std::chrono::days(1)).ordinal() == w.ordinal() - 1);
    CHECK(w.monday() == monday);
}

TEST_CASE("week ordinals are consecutive across year boundaries") {
    Date d = *parse_date("2008-11-03");
    auto prev = assign_week(d);
    for (int i = 0; i < 600; ++i) {
        d += std::chrono::days(7);
        const auto w = assign_week(d);
        CHECK(w.ordinal() == prev.ordinal() + 1);
        CHECK(WeekIndex::from_ordinal(w.ordinal()) == w);
        CHECK(w > prev);
        prev = w;
    }
}

TEST_CASE("Friday-anchored trading weeks") {
    // Saturday 2015-01-03 .. Friday 2015-01-09 is labelled by the Friday's ISO week.
    const auto w = assign_week(*parse_date("2015-01-09"), WeekConvention::FridayTrading);
    CHECK(assign_week(*parse_date("2015-01-03"), WeekConvention::FridayTrading) == w);
    CHECK(assign_week(*parse_date("2015-01-10"), WeekConvention::FridayTrading).ordinal() == w.ordinal() + 1);
    CHECK(week_first_day(w, WeekConvention::FridayTrading) == *parse_date("2015-01-03"));
    CHECK(week_last_day(w, WeekConvention::FridayTrading) == *parse_date("2015-01-09"));
    CHECK(parse_week_convention("iso") == WeekConvention::Iso);
    CHECK_FALSE(parse_week_convention("sunday").has_value());
}

TEST_CASE("quarters and months") {
    CHECK(parse_quarter("2015Q3") == Quarter{2015, 3});
    CHECK(parse_quarter("2015-q4") == Quarter{2015, 4});
    CHECK_FALSE(parse_quarter("2015Q5").has_value());
    CHECK(format_quarter(Quarter{2015, 1}) == "2015Q1");
    CHECK(Quarter::from_ordinal(Quarter{2015, 1}.ordinal() - 1) == Quarter{2014, 4});
    CHECK(quarter_of(*parse_date("2015-06-30")) == Quarter{2015, 2});
    CHECK(Quarter{2015, 2}.first_day() == *parse_date("2015-04-01"));
    CHECK(Quarter{2015, 4}.last_day() == *parse_date("2015-12-31"));
    CHECK(parse_month("2016-02") == Month{2016, 2});
    CHECK(Month{2016, 2}.last_day() == *parse_date("2016-02-29"));
    CHECK(format_month(Month{2016, 2}) == "2016-02");
}

TEST_CASE("CSV reader handles quoting and tracks lines") {
    std::istringstream in("a,b,c\n\"x, y\",\"he said \"\"hi\"\"\",\"multi\nline\"\nlast,,\n");
    csv::Reader r(in);
    std::vector<std::string> f;
    REQUIRE(r.next(f));
    CHECK(f == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(r.next(f));
    CHECK(r.record_line() == 2);
    CHECK(f == std::vector<std::string>{"x, y", "he said \"hi\"", "multi\nline"});
    REQUIRE(r.next(f));
    CHECK(r.record_line() == 4);
    CHECK(f == std::vector<std::string>{"last", "", ""});
    CHECK_FALSE(r.next(f));
}

TEST_CASE("CSV writer round-trips through the reader") {
    const std::vector<std::string> row = {"plain", "with,comma", "quote\"inside", "new\nline", ""};
    std::ostringstream out;
    csv::write_row(out, row);
    std::istringstream in(out.str());
    csv::Reader r(in);
    std::vector<std::string> f;
    REQUIRE(r.next(f));
    CHECK(f == row);
}

TEST_CASE("numbers format with round-trip precision") {
    for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456789.125, 0.0}) {
        CHECK(*csv::parse_optional_double(csv::format_number(v)) == v);
    }
    CHECK(csv::format_optional(std::nullopt).empty());
    CHECK_FALSE(csv::parse_optional_double("").has_value());
}

TEST_CASE("UTF-8 decode, encode and fold") {
    const std::string s = "Good 好评 ÉTÉ";
    const auto cps = utf8::decode(s);
    CHECK(utf8::encode(cps) == s);
    CHECK(utf8::encode(utf8::fold(cps)) == "good 好评 été");
    CHECK(utf8::decode("\xff").front() == U'�');
}
