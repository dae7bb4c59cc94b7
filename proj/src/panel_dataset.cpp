#include "revpanel/panel_dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "revpanel/csv.hpp"
#include "revpanel/error.hpp"

namespace revpanel::econ {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double to_value(const std::optional<double>& v) { return v ? *v : kNaN; }

}  // namespace

bool PanelDataset::has(std::string_view name) const { return columns.find(std::string(name)) != columns.end(); }

const std::vector<double>& PanelDataset::column(std::string_view name) const {
    auto it = columns.find(std::string(name));
    if (it == columns.end()) throw Error(fmt::format("panel has no column '{}'", name));
    return it->second;
}

void PanelDataset::set_column(const std::string& name, std::vector<double> values) {
    if (values.size() != rows()) {
        throw Error(fmt::format("column '{}' has {} values for {} rows", name, values.size(), rows()));
    }
    columns[name] = std::move(values);
}

void PanelDataset::validate() const {
    if (time.size() != firm.size() || year.size() != firm.size()) throw Error("panel index lengths differ");
    for (std::size_t r = 0; r < rows(); ++r) {
        if (firm[r] >= firm_ids.size()) throw Error("panel firm index out of range");
        if (r > 0 && std::tie(firm[r - 1], time[r - 1]) >= std::tie(firm[r], time[r])) {
            throw Error(fmt::format("panel rows not strictly increasing at row {}", r));
        }
    }
    for (const auto& [name, v] : columns) {
        if (v.size() != rows()) throw Error(fmt::format("column '{}' has wrong length", name));
    }
}

PanelDataset make_panel(const std::vector<std::string>& firm_per_row, std::vector<std::int64_t> time,
                        std::vector<int> year) {
    PanelDataset p;
    p.firm_ids = firm_per_row;
    std::sort(p.firm_ids.begin(), p.firm_ids.end());
    p.firm_ids.erase(std::unique(p.firm_ids.begin(), p.firm_ids.end()), p.firm_ids.end());
    p.firm.reserve(firm_per_row.size());
    for (const auto& f : firm_per_row) {
        p.firm.push_back(static_cast<std::size_t>(
            std::lower_bound(p.firm_ids.begin(), p.firm_ids.end(), f) - p.firm_ids.begin()));
    }
    p.time = std::move(time);
    p.year = std::move(year);
    p.validate();
    return p;
}

std::vector<double> lag_column(const PanelDataset& p, std::span<const double> values, int k) {
    if (values.size() != p.rows()) throw Error("lag_column: length mismatch");
    std::vector<double> out(p.rows(), kNaN);
    std::size_t begin = 0;
    while (begin < p.rows()) {
        std::size_t end = begin;
        while (end < p.rows() && p.firm[end] == p.firm[begin]) ++end;
        const auto first = p.time.begin() + static_cast<std::ptrdiff_t>(begin);
        const auto last = p.time.begin() + static_cast<std::ptrdiff_t>(end);
        for (std::size_t r = begin; r < end; ++r) {
            const std::int64_t target = p.time[r] - k;
            auto it = std::lower_bound(first, last, target);
            if (it != last && *it == target) out[r] = values[static_cast<std::size_t>(it - p.time.begin())];
        }
        begin = end;
    }
    return out;
}

std::vector<std::size_t> complete_rows(const PanelDataset& p, const std::vector<std::string>& names,
                                       std::span<const std::size_t> subset) {
    std::vector<const std::vector<double>*> cols;
    for (const auto& n : names) cols.push_back(&p.column(n));
    std::vector<std::size_t> candidates;
    if (subset.empty()) {
        candidates.resize(p.rows());
        for (std::size_t r = 0; r < p.rows(); ++r) candidates[r] = r;
    } else {
        candidates.assign(subset.begin(), subset.end());
    }
    std::vector<std::size_t> out;
    for (std::size_t r : candidates) {
        bool ok = true;
        for (const auto* c : cols) ok = ok && std::isfinite((*c)[r]);
        if (ok) out.push_back(r);
    }
    return out;
}

PanelDataset select_rows(const PanelDataset& p, std::span<const std::size_t> rows) {
    PanelDataset out;
    out.firm_ids = p.firm_ids;
    for (std::size_t r : rows) {
        out.firm.push_back(p.firm[r]);
        out.time.push_back(p.time[r]);
        out.year.push_back(p.year[r]);
    }
    for (const auto& [name, v] : p.columns) {
        std::vector<double> sub;
        sub.reserve(rows.size());
        for (std::size_t r : rows) sub.push_back(v[r]);
        out.columns.emplace(name, std::move(sub));
    }
    out.validate();
    return out;
}

PanelDataset assemble_panel(const std::vector<panel::FirmWeekRow>& features,
                            const std::vector<chars::ControlRow>& controls,
                            const std::set<std::string>& firms) {
    struct Slot {
        const panel::FirmWeekRow* feature = nullptr;
        const chars::ControlRow* control = nullptr;
    };
    std::map<std::pair<std::string, std::int64_t>, Slot> slots;
    std::map<std::int64_t, WeekIndex> weeks;
    for (const auto& f : features) {
        if (!firms.count(f.firm_id)) continue;
        slots[{f.firm_id, f.week.ordinal()}].feature = &f;
        weeks.emplace(f.week.ordinal(), f.week);
    }
    std::set<std::string> with_reviews;
    for (const auto& [key, slot] : slots) with_reviews.insert(key.first);
    for (const auto& c : controls) {
        if (!with_reviews.count(c.firm_id)) continue;
        slots[{c.firm_id, c.week.ordinal()}].control = &c;
        weeks.emplace(c.week.ordinal(), c.week);
    }

    std::vector<std::string> firm_per_row;
    std::vector<std::int64_t> time;
    std::vector<int> year;
    for (const auto& [key, slot] : slots) {
        firm_per_row.push_back(key.first);
        time.push_back(key.second);
        year.push_back(weeks.at(key.second).year);
    }
    PanelDataset p = make_panel(firm_per_row, std::move(time), std::move(year));

    const std::size_t n = p.rows();
    auto feature_col = [&](auto get) {
        std::vector<double> v(n, kNaN);
        std::size_t r = 0;
        for (const auto& [key, slot] : slots) {
            if (slot.feature) v[r] = get(*slot.feature);
            ++r;
        }
        return v;
    };
    p.set_column("n_reviews", feature_col([](const panel::FirmWeekRow& f) { return double(f.n_reviews); }));
    p.set_column("n_neg", feature_col([](const panel::FirmWeekRow& f) { return double(f.n_neg); }));
    p.set_column("n_pos", feature_col([](const panel::FirmWeekRow& f) { return double(f.n_pos); }));
    p.set_column("diff_neg", feature_col([](const panel::FirmWeekRow& f) { return to_value(f.diff_neg); }));
    p.set_column("diff_pos", feature_col([](const panel::FirmWeekRow& f) { return to_value(f.diff_pos); }));
    p.set_column("diff_star1", feature_col([](const panel::FirmWeekRow& f) { return to_value(f.diff_star1); }));
    p.set_column("diff_star5", feature_col([](const panel::FirmWeekRow& f) { return to_value(f.diff_star5); }));

    for (const auto& name : chars::control_columns()) {
        std::vector<double> v(n, kNaN);
        std::size_t r = 0;
        for (const auto& [key, slot] : slots) {
            if (slot.control) v[r] = to_value(chars::control_value(*slot.control, name));
            ++r;
        }
        p.set_column(name, std::move(v));
    }
    p.set_column("ret_lead", lag_column(p, p.column("ret"), -1));
    return p;
}

void write_panel_csv(const std::filesystem::path& path, const PanelDataset& p) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    std::vector<std::string> header = {"firm_id", "iso_year", "iso_week"};
    for (const auto& [name, v] : p.columns) header.push_back(name);
    csv::write_row(out, header);
    for (std::size_t r = 0; r < p.rows(); ++r) {
        const WeekIndex w = WeekIndex::from_ordinal(p.time[r]);
        std::vector<std::string> f = {p.firm_ids[p.firm[r]], std::to_string(w.year), std::to_string(w.week)};
        for (const auto& [name, v] : p.columns) f.push_back(std::isfinite(v[r]) ? csv::format_number(v[r]) : "");
        csv::write_row(out, f);
    }
}

PanelDataset read_panel_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("panel file not found: {}", path.string()));
    csv::Reader reader(in);
    std::vector<std::string> f;
    if (!reader.next(f)) throw Error(fmt::format("{}: empty panel file", path.string()));
    const std::vector<std::string> header = f;
    csv::Header h(header);
    const std::string name = path.string();
    const auto c_firm = h.require("firm_id", name);
    const auto c_year = h.require("iso_year", name);
    const auto c_week = h.require("iso_week", name);
    std::vector<std::string> firms;
    std::vector<std::int64_t> time;
    std::vector<int> year;
    std::vector<std::vector<double>> values(header.size());
    while (reader.next(f)) {
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() != header.size()) {
            throw Error(fmt::format("{}:{}: wrong field count", name, reader.record_line()));
        }
        WeekIndex w{std::stoi(f[c_year]), std::stoi(f[c_week])};
        firms.push_back(f[c_firm]);
        time.push_back(w.ordinal());
        year.push_back(w.year);
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (j == c_firm || j == c_year || j == c_week) continue;
            values[j].push_back(to_value(csv::parse_optional_double(f[j])));
        }
    }
    PanelDataset p = make_panel(firms, std::move(time), std::move(year));
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j == c_firm || j == c_year || j == c_week) continue;
        p.set_column(header[j], std::move(values[j]));
    }
    return p;
}

}  // namespace revpanel::econ
