#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "revpanel/econometrics.hpp"

namespace revpanel::econ {

struct TableOptions {
    std::vector<std::string> controls = {"ad", "bm", "rd", "roa", "size", "ivol",
                                         "gp", "turn", "beta", "illiq", "ag"};
    TimeEffects time_effects = TimeEffects::Year;
    SePolicy static_se = SePolicy::ClusteredFirm;
    GmmOptions gmm;
};

struct TableCell {
    std::string label;    // e.g. "static", "high ccis"
    std::string outcome;  // outcome column
    std::string focus;    // regressor whose one-sigma effect is reported
    std::optional<FitResult> fit;
    std::string error;  // set when the estimation failed
};

struct TableResult {
    std::string name;
    std::string title;
    std::vector<TableCell> cells;
};

const std::vector<std::string>& table_names();

// Runs every cell of a named table. Estimation failures are stored per cell.
TableResult run_table(const PanelDataset& p, std::string_view name, const TableOptions& options);

// Rows: term x {coef, se, t}, then diagnostics; one column per cell.
std::string table_csv(const TableResult& table);
std::string tables_markdown(const std::vector<TableResult>& tables);

// Single-fit variants used by the regress command.
TableResult single_fit_table(const FitResult& fit, std::string label);

// Significance stars at the 10/5/1% levels of a two-sided normal test.
std::string stars(double t);

}  // namespace revpanel::econ
