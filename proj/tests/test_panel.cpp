#include <doctest.h>

#include <algorithm>
#include <random>

#include "revpanel/panel.hpp"
#include "test_util.hpp"

using namespace revpanel;
using namespace revpanel::panel;
using sentiment::Polarity;

namespace {

ClassifiedReview cr(std::string firm, std::string date, int stars, Polarity p) {
    return {std::move(firm), *parse_date(date), stars, p};
}

FirmWeekRow level(std::string firm, WeekIndex w, std::uint32_t n, std::uint32_t neg, std::uint32_t pos,
                  std::array<std::uint32_t, 5> stars) {
    FirmWeekRow r;
    r.firm_id = std::move(firm);
    r.week = w;
    r.n_reviews = n;
    r.n_neg = neg;
    r.n_pos = pos;
    r.star_counts = stars;
    return r;
}

ingest::ReviewRecord record(std::string firm, Date d) {
    ingest::ReviewRecord r;
    r.firm_id = std::move(firm);
    r.date = d;
    r.stars = 5;
    return r;
}

}  // namespace

TEST_CASE("aggregation counts one firm-week exactly") {
    std::vector<ClassifiedReview> in = {cr("F", "2015-01-05", 1, Polarity::Negative),
                                        cr("F", "2015-01-06", 1, Polarity::Negative),
                                        cr("F", "2015-01-07", 5, Polarity::Positive),
                                        cr("F", "2015-01-11", 3, Polarity::Neutral)};
    const auto rows = aggregate_firm_week(in);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n_reviews == 4);
    CHECK(rows[0].n_neg == 2);
    CHECK(rows[0].n_pos == 1);
    CHECK(rows[0].star_counts == std::array<std::uint32_t, 5>{2, 0, 1, 0, 1});
    CHECK_FALSE(rows[0].diff_neg.has_value());

    std::mt19937_64 gen(5);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(in.begin(), in.end(), gen);
        const auto again = aggregate_firm_week(in);
        REQUIRE(again.size() == 1);
        CHECK(again[0].star_counts == rows[0].star_counts);
        CHECK(again[0].n_neg == 2);
    }
}

TEST_CASE("weeks without reviews emit no rows") {
    const auto rows = aggregate_firm_week({cr("F", "2015-01-05", 4, Polarity::Positive),
                                           cr("F", "2015-01-19", 4, Polarity::Positive),
                                           cr("G", "2015-01-05", 2, Polarity::Negative)});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].firm_id == "F");
    CHECK(rows[1].week.ordinal() == rows[0].week.ordinal() + 2);
    CHECK(rows[2].firm_id == "G");
}

TEST_CASE("count and ratio diffs") {
    const WeekIndex w1 = assign_week(*parse_date("2015-01-05"));
    const WeekIndex w2 = WeekIndex::from_ordinal(w1.ordinal() + 1);
    std::vector<FirmWeekRow> rows = {level("F", w1, 8, 3, 2, {4, 1, 1, 1, 1}),
                                     level("F", w2, 10, 5, 1, {2, 2, 2, 2, 2})};
    compute_diffs(rows);
    CHECK_FALSE(rows[0].diff_neg.has_value());
    CHECK_FALSE(rows[0].diff_star1.has_value());
    CHECK(*rows[1].diff_neg == 2.0);
    CHECK(*rows[1].diff_pos == -1.0);
    CHECK(*rows[1].diff_star1 == doctest::Approx(-0.3).epsilon(1e-15));
    CHECK(*rows[1].diff_star5 == doctest::Approx(0.2 - 0.125).epsilon(1e-15));
}

TEST_CASE("a gap week leaves diffs absent") {
    const WeekIndex w1 = assign_week(*parse_date("2015-01-05"));
    std::vector<FirmWeekRow> rows = {level("F", w1, 2, 1, 1, {1, 0, 0, 0, 1}),
                                     level("F", WeekIndex::from_ordinal(w1.ordinal() + 2), 3, 2, 0, {2, 0, 1, 0, 0}),
                                     level("G", WeekIndex::from_ordinal(w1.ordinal() + 3), 1, 1, 0, {1, 0, 0, 0, 0})};
    compute_diffs(rows);
    CHECK_FALSE(rows[1].diff_neg.has_value());
    CHECK_FALSE(rows[2].diff_neg.has_value());
}

TEST_CASE("star-ratio diffs sum to zero and stay in [-1, 1]; count diffs telescope") {
    std::mt19937_64 gen(17);
    const WeekIndex start = assign_week(*parse_date("2015-01-05"));
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<FirmWeekRow> rows;
        const int weeks = 2 + static_cast<int>(gen() % 30);
        for (int w = 0; w < weeks; ++w) {
            std::array<std::uint32_t, 5> s{};
            std::uint32_t n = 0;
            while (n == 0) {
                for (auto& c : s) c = static_cast<std::uint32_t>(gen() % 6);
                n = s[0] + s[1] + s[2] + s[3] + s[4];
            }
            const auto neg = static_cast<std::uint32_t>(gen() % (n + 1));
            const auto pos = static_cast<std::uint32_t>(gen() % (n - neg + 1));
            rows.push_back(level("F", WeekIndex::from_ordinal(start.ordinal() + w), n, neg, pos, s));
        }
        compute_diffs(rows);
        double sum_neg = 0.0, sum_pos = 0.0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            REQUIRE(r.diff_star1.has_value());
            double total = 0.0;
            for (int s = 1; s <= 5; ++s) {
                const double d = star_ratio_diff(r, rows[i - 1], s);
                CHECK(d >= -1.0);
                CHECK(d <= 1.0);
                total += d;
            }
            CHECK(std::abs(total) < 1e-12);
            CHECK(*r.diff_star1 == star_ratio_diff(r, rows[i - 1], 1));
            CHECK(*r.diff_star5 == star_ratio_diff(r, rows[i - 1], 5));
            sum_neg += *r.diff_neg;
            sum_pos += *r.diff_pos;
        }
        CHECK(sum_neg == double(rows.back().n_neg) - double(rows.front().n_neg));
        CHECK(sum_pos == double(rows.back().n_pos) - double(rows.front().n_pos));
    }
}

TEST_CASE("trailing accumulation window") {
    const WeekIndex w1 = assign_week(*parse_date("2015-01-05"));
    std::vector<FirmWeekRow> rows = {level("F", w1, 2, 1, 0, {1, 0, 0, 0, 1}),
                                     level("F", WeekIndex::from_ordinal(w1.ordinal() + 1), 3, 0, 2, {0, 0, 1, 0, 2}),
                                     level("F", WeekIndex::from_ordinal(w1.ordinal() + 3), 1, 1, 0, {1, 0, 0, 0, 0})};
    const auto same = accumulate_window(rows, 1);
    REQUIRE(same.size() == 3);
    CHECK(same[1].n_reviews == 3);

    const auto two = accumulate_window(rows, 2);
    // Rows stay on weeks with reviews; w1+3 sees only itself since w1+2 is empty.
    REQUIRE(two.size() == 3);
    CHECK(two[0].n_reviews == 2);
    CHECK(two[1].n_reviews == 5);
    CHECK(two[1].n_pos == 2);
    CHECK(two[1].star_counts == std::array<std::uint32_t, 5>{1, 0, 1, 0, 3});
    CHECK(two[2].n_reviews == 1);
}

TEST_CASE("eligibility boundaries") {
    const Date d0 = *parse_date("2014-01-01");
    std::map<std::string, FirmActivity> act;
    act["few"] = {999, d0, d0 + std::chrono::days(730)};
    act["short"] = {5000, d0, d0 + std::chrono::days(300)};
    act["edge"] = {1000, d0, d0 + std::chrono::days(365)};
    act["almost"] = {1000, d0, d0 + std::chrono::days(364)};
    const auto e = filter_eligible(act, {});
    CHECK(e.eligible_firms == std::set<std::string>{"edge"});
    CHECK(e.reasons.at("few").find("review count") != std::string::npos);
    CHECK(e.reasons.at("short").find("timespan") != std::string::npos);
    CHECK(e.reasons.size() + e.eligible_firms.size() == act.size());

    EligibilityThresholds loose{500, 30};
    CHECK(filter_eligible(act, loose).eligible_firms.size() == 4);
}

TEST_CASE("firm activity from records") {
    std::vector<ingest::ReviewRecord> recs = {record("F", *parse_date("2015-03-01")),
                                              record("F", *parse_date("2015-01-01")),
                                              record("G", *parse_date("2016-01-01"))};
    const auto act = firm_activity(recs);
    CHECK(act.at("F").reviews == 2);
    CHECK(act.at("F").first == *parse_date("2015-01-01"));
    CHECK(act.at("F").last == *parse_date("2015-03-01"));
}

TEST_CASE("features CSV round-trip") {
    const WeekIndex w1 = assign_week(*parse_date("2015-12-28"));
    std::vector<FirmWeekRow> rows = {level("F,1", w1, 3, 1, 1, {1, 0, 1, 0, 1}),
                                     level("F,1", WeekIndex::from_ordinal(w1.ordinal() + 1), 7, 3, 2, {2, 1, 1, 1, 2})};
    compute_diffs(rows);
    const auto dir = scratch_dir("features_csv");
    write_features_csv(dir / "f.csv", rows);
    const auto back = read_features_csv(dir / "f.csv");
    REQUIRE(back.size() == 2);
    CHECK(back[0].firm_id == "F,1");
    CHECK(back[1].week == rows[1].week);
    CHECK(back[1].star_counts == rows[1].star_counts);
    CHECK(*back[1].diff_star5 == *rows[1].diff_star5);
    CHECK_FALSE(back[0].diff_neg.has_value());
    CHECK(features_csv_string(back) == read_file(dir / "f.csv"));
    const std::string header = read_file(dir / "f.csv").substr(0, read_file(dir / "f.csv").find('\n'));
    CHECK(header ==
          "firm_id,iso_year,iso_week,n_reviews,n_neg,n_pos,star1,star2,star3,star4,star5,diff_neg,diff_pos,"
          "diff_star1,diff_star5");
}
