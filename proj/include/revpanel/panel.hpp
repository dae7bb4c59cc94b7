#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "revpanel/calendar.hpp"
#include "revpanel/ingest.hpp"
#include "revpanel/sentiment.hpp"

namespace revpanel::panel {

struct ClassifiedReview {
    std::string firm_id;
    Date date{};
    int stars = 0;
    sentiment::Polarity polarity = sentiment::Polarity::Neutral;
};

std::vector<ClassifiedReview> classify_reviews(const std::vector<ingest::ReviewRecord>& records,
                                               const sentiment::Lexicon& lexicon);

struct FirmWeekRow {
    std::string firm_id;
    WeekIndex week;
    std::uint32_t n_reviews = 0;
    std::uint32_t n_neg = 0;
    std::uint32_t n_pos = 0;
    std::array<std::uint32_t, 5> star_counts{};  // index s-1
    std::optional<double> diff_neg;    // CNST
    std::optional<double> diff_pos;    // CPST
    std::optional<double> diff_star1;  // OST
    std::optional<double> diff_star5;  // FST

    std::uint32_t stars(int s) const { return star_counts[static_cast<std::size_t>(s - 1)]; }
    double star_ratio(int s) const;
};

// One level row per (firm, week) with at least one review, sorted by firm
// then week. Diffs are left empty.
std::vector<FirmWeekRow> aggregate_firm_week(const std::vector<ClassifiedReview>& reviews,
                                             WeekConvention convention = WeekConvention::Iso);

// Replaces each row's counts with the sum over the trailing `window_weeks`
// calendar weeks (inclusive). window_weeks == 1 is the identity.
std::vector<FirmWeekRow> accumulate_window(const std::vector<FirmWeekRow>& rows, int window_weeks);

// Ratio difference of star share s between a row and its predecessor.
double star_ratio_diff(const FirmWeekRow& current, const FirmWeekRow& previous, int s);

// Count differences for CNST/CPST and share differences for OST/FST against
// the immediately preceding calendar week of the same firm. Rows must be
// sorted by firm then week; diffs stay empty when that week has no row.
void compute_diffs(std::vector<FirmWeekRow>& rows);

struct EligibilityThresholds {
    std::size_t min_reviews = 1000;
    int min_span_days = 365;
};

struct EligibilitySet {
    std::set<std::string> eligible_firms;
    std::map<std::string, std::string> reasons;  // excluded firm -> reason
};

struct FirmActivity {
    std::size_t reviews = 0;
    Date first{};
    Date last{};
};

std::map<std::string, FirmActivity> firm_activity(const std::vector<ingest::ReviewRecord>& records);

// Eligible iff review count >= min_reviews and last - first >= min_span_days.
EligibilitySet filter_eligible(const std::map<std::string, FirmActivity>& activity,
                               const EligibilityThresholds& thresholds);

std::vector<FirmWeekRow> restrict_to(const std::vector<FirmWeekRow>& rows,
                                     const std::set<std::string>& firms);

// CSV with columns firm_id, iso_year, iso_week, n_reviews, n_neg, n_pos,
// star1..star5, diff_neg, diff_pos, diff_star1, diff_star5.
void write_features_csv(const std::filesystem::path& path, const std::vector<FirmWeekRow>& rows);
std::vector<FirmWeekRow> read_features_csv(const std::filesystem::path& path);
std::string features_csv_string(const std::vector<FirmWeekRow>& rows);

void write_eligibility_csv(const std::filesystem::path& path, const EligibilitySet& set,
                           const std::map<std::string, FirmActivity>& activity);

}  // namespace revpanel::panel
