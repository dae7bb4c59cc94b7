#include "revpanel/panel.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "revpanel/csv.hpp"
#include "revpanel/error.hpp"

namespace revpanel::panel {

namespace {

const std::vector<std::string> kFeatureColumns = {
    "firm_id", "iso_year", "iso_week", "n_reviews", "n_neg",      "n_pos",      "star1",
    "star2",   "star3",    "star4",    "star5",     "diff_neg",   "diff_pos",   "diff_star1",
    "diff_star5"};

bool row_less(const FirmWeekRow& a, const FirmWeekRow& b) {
    return std::tie(a.firm_id, a.week) < std::tie(b.firm_id, b.week);
}

}  // namespace

std::vector<ClassifiedReview> classify_reviews(const std::vector<ingest::ReviewRecord>& records,
                                               const sentiment::Lexicon& lexicon) {
    std::vector<ClassifiedReview> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        out.push_back({r.firm_id, r.date, r.stars, sentiment::classify(lexicon.count(r.text))});
    }
    return out;
}

double FirmWeekRow::star_ratio(int s) const {
    return static_cast<double>(stars(s)) / static_cast<double>(n_reviews);
}

std::vector<FirmWeekRow> aggregate_firm_week(const std::vector<ClassifiedReview>& reviews,
                                             WeekConvention convention) {
    std::map<std::pair<std::string, WeekIndex>, FirmWeekRow> cells;
    for (const auto& r : reviews) {
        WeekIndex w = assign_week(r.date, convention);
        auto& row = cells[{r.firm_id, w}];
        row.firm_id = r.firm_id;
        row.week = w;
        ++row.n_reviews;
        if (r.polarity == sentiment::Polarity::Negative) ++row.n_neg;
        if (r.polarity == sentiment::Polarity::Positive) ++row.n_pos;
        if (r.stars >= 1 && r.stars <= 5) ++row.star_counts[static_cast<std::size_t>(r.stars - 1)];
    }
    std::vector<FirmWeekRow> out;
    out.reserve(cells.size());
    for (auto& [key, row] : cells) out.push_back(std::move(row));
    return out;
}

std::vector<FirmWeekRow> accumulate_window(const std::vector<FirmWeekRow>& rows, int window_weeks) {
    if (window_weeks < 1) throw Error("accumulation window must be at least one week");
    if (window_weeks == 1) return rows;
    std::vector<FirmWeekRow> out;
    out.reserve(rows.size());
    std::size_t begin = 0;
    while (begin < rows.size()) {
        std::size_t end = begin;
        while (end < rows.size() && rows[end].firm_id == rows[begin].firm_id) ++end;
        std::deque<const FirmWeekRow*> window;
        for (std::size_t i = begin; i < end; ++i) {
            const std::int64_t t = rows[i].week.ordinal();
            window.push_back(&rows[i]);
            while (window.front()->week.ordinal() <= t - window_weeks) window.pop_front();
            FirmWeekRow acc;
            acc.firm_id = rows[i].firm_id;
            acc.week = rows[i].week;
            for (const FirmWeekRow* r : window) {
                acc.n_reviews += r->n_reviews;
                acc.n_neg += r->n_neg;
                acc.n_pos += r->n_pos;
                for (std::size_t s = 0; s < 5; ++s) acc.star_counts[s] += r->star_counts[s];
            }
            out.push_back(std::move(acc));
        }
        begin = end;
    }
    return out;
}

double star_ratio_diff(const FirmWeekRow& current, const FirmWeekRow& previous, int s) {
    return current.star_ratio(s) - previous.star_ratio(s);
}

void compute_diffs(std::vector<FirmWeekRow>& rows) {
    if (!std::is_sorted(rows.begin(), rows.end(), row_less)) {
        throw Error("compute_diffs: rows must be sorted by firm and week");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& cur = rows[i];
        cur.diff_neg.reset();
        cur.diff_pos.reset();
        cur.diff_star1.reset();
        cur.diff_star5.reset();
        if (i == 0) continue;
        const auto& prev = rows[i - 1];
        if (prev.firm_id != cur.firm_id || prev.week.ordinal() + 1 != cur.week.ordinal()) continue;
        if (prev.n_reviews == 0 || cur.n_reviews == 0) continue;
        cur.diff_neg = static_cast<double>(cur.n_neg) - static_cast<double>(prev.n_neg);
        cur.diff_pos = static_cast<double>(cur.n_pos) - static_cast<double>(prev.n_pos);
        cur.diff_star1 = star_ratio_diff(cur, prev, 1);
        cur.diff_star5 = star_ratio_diff(cur, prev, 5);
    }
}

std::map<std::string, FirmActivity> firm_activity(const std::vector<ingest::ReviewRecord>& records) {
    std::map<std::string, FirmActivity> out;
    for (const auto& r : records) {
        auto [it, fresh] = out.try_emplace(r.firm_id);
        auto& a = it->second;
        if (fresh) {
            a.first = a.last = r.date;
        } else {
            a.first = std::min(a.first, r.date);
            a.last = std::max(a.last, r.date);
        }
        ++a.reviews;
    }
    return out;
}

EligibilitySet filter_eligible(const std::map<std::string, FirmActivity>& activity,
                               const EligibilityThresholds& thresholds) {
    EligibilitySet set;
    for (const auto& [firm, a] : activity) {
        if (a.reviews < thresholds.min_reviews) {
            set.reasons[firm] = "review count";
        } else if ((a.last - a.first).count() < thresholds.min_span_days) {
            set.reasons[firm] = "timespan";
        } else {
            set.eligible_firms.insert(firm);
        }
    }
    return set;
}

std::vector<FirmWeekRow> restrict_to(const std::vector<FirmWeekRow>& rows,
                                     const std::set<std::string>& firms) {
    std::vector<FirmWeekRow> out;
    std::copy_if(rows.begin(), rows.end(), std::back_inserter(out),
                 [&](const FirmWeekRow& r) { return firms.count(r.firm_id) > 0; });
    return out;
}

std::string features_csv_string(const std::vector<FirmWeekRow>& rows) {
    std::ostringstream out;
    csv::write_row(out, kFeatureColumns);
    for (const auto& r : rows) {
        std::vector<std::string> f = {r.firm_id, std::to_string(r.week.year), std::to_string(r.week.week),
                                      std::to_string(r.n_reviews), std::to_string(r.n_neg),
                                      std::to_string(r.n_pos)};
        for (int s = 1; s <= 5; ++s) f.push_back(std::to_string(r.stars(s)));
        f.push_back(csv::format_optional(r.diff_neg));
        f.push_back(csv::format_optional(r.diff_pos));
        f.push_back(csv::format_optional(r.diff_star1));
        f.push_back(csv::format_optional(r.diff_star5));
        csv::write_row(out, f);
    }
    return out.str();
}

void write_features_csv(const std::filesystem::path& path, const std::vector<FirmWeekRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    out << features_csv_string(rows);
}

std::vector<FirmWeekRow> read_features_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("features file not found: {}", path.string()));
    csv::Reader reader(in);
    std::vector<std::string> f;
    if (!reader.next(f)) return {};
    csv::Header h(f);
    const std::string name = path.string();
    std::vector<std::size_t> idx;
    for (const auto& col : kFeatureColumns) idx.push_back(h.require(col, name));
    std::vector<FirmWeekRow> rows;
    while (reader.next(f)) {
        if (f.size() != h.size()) continue;
        FirmWeekRow r;
        r.firm_id = f[idx[0]];
        r.week = WeekIndex{std::stoi(f[idx[1]]), std::stoi(f[idx[2]])};
        r.n_reviews = static_cast<std::uint32_t>(std::stoul(f[idx[3]]));
        r.n_neg = static_cast<std::uint32_t>(std::stoul(f[idx[4]]));
        r.n_pos = static_cast<std::uint32_t>(std::stoul(f[idx[5]]));
        for (std::size_t s = 0; s < 5; ++s) {
            r.star_counts[s] = static_cast<std::uint32_t>(std::stoul(f[idx[6 + s]]));
        }
        r.diff_neg = csv::parse_optional_double(f[idx[11]]);
        r.diff_pos = csv::parse_optional_double(f[idx[12]]);
        r.diff_star1 = csv::parse_optional_double(f[idx[13]]);
        r.diff_star5 = csv::parse_optional_double(f[idx[14]]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_eligibility_csv(const std::filesystem::path& path, const EligibilitySet& set,
                           const std::map<std::string, FirmActivity>& activity) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    csv::write_row(out, {"firm_id", "reviews", "first_date", "last_date", "eligible", "reason"});
    for (const auto& [firm, a] : activity) {
        bool ok = set.eligible_firms.count(firm) > 0;
        auto reason = set.reasons.find(firm);
        csv::write_row(out, {firm, std::to_string(a.reviews), format_date(a.first), format_date(a.last),
                             ok ? "1" : "0", reason == set.reasons.end() ? "" : reason->second});
    }
}

}  // namespace revpanel::panel
