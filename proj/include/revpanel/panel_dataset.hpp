#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "revpanel/characteristics.hpp"
#include "revpanel/panel.hpp"

namespace revpanel::econ {

// Long-format firm x time panel. Rows are sorted by (firm, time) and each
// (firm, time) pair occurs once. Missing values are NaN.
struct PanelDataset {
    std::vector<std::string> firm_ids;  // distinct, sorted; firm[r] indexes this
    std::vector<std::size_t> firm;
    std::vector<std::int64_t> time;  // consecutive periods differ by 1
    std::vector<int> year;           // grouping for year effects
    std::map<std::string, std::vector<double>> columns;

    std::size_t rows() const { return firm.size(); }
    bool has(std::string_view name) const;
    // Throws revpanel::Error for unknown columns.
    const std::vector<double>& column(std::string_view name) const;
    void set_column(const std::string& name, std::vector<double> values);

    // Throws when rows are unsorted, duplicated or columns have the wrong
    // length.
    void validate() const;
};

// Builds the row index from per-row firm labels and times; rows must already
// be sorted by (firm label, time).
PanelDataset make_panel(const std::vector<std::string>& firm_per_row, std::vector<std::int64_t> time,
                        std::vector<int> year);

// Value of `values` at (same firm, time - k) for each row; NaN when that
// period is absent. Negative k gives leads.
std::vector<double> lag_column(const PanelDataset& p, std::span<const double> values, int k);

// Rows (ascending) where every named column is finite.
std::vector<std::size_t> complete_rows(const PanelDataset& p, const std::vector<std::string>& names,
                                       std::span<const std::size_t> subset = {});

// Row subset of `p`; firm_ids is kept so firm indices stay comparable.
PanelDataset select_rows(const PanelDataset& p, std::span<const std::size_t> rows);

// Joins review features and weekly controls on (firm, week) for the given
// firms and adds the outcome column ret_lead (next week's return).
PanelDataset assemble_panel(const std::vector<panel::FirmWeekRow>& features,
                            const std::vector<chars::ControlRow>& controls,
                            const std::set<std::string>& firms);

// CSV: firm_id, iso_year, iso_week, then columns in name order.
void write_panel_csv(const std::filesystem::path& path, const PanelDataset& p);
PanelDataset read_panel_csv(const std::filesystem::path& path);

}  // namespace revpanel::econ
