#include "revpanel/tables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "revpanel/csv.hpp"
#include "revpanel/error.hpp"
#include "revpanel/least_squares.hpp"

namespace revpanel::econ {

namespace {

struct CellPlan {
    std::string label;
    RegressionSpec spec;
    std::string split_variable;  // empty for full sample
    bool high = true;
};

std::string display_name(std::string_view term) {
    static const std::map<std::string, std::string, std::less<>> names = {
        {"diff_neg", "CNST"},     {"diff_pos", "CPST"},       {"diff_star1", "OST"},
        {"diff_star5", "FST"},    {"ret_lead", "R(t+1)"},     {"L1.ret_lead", "R(t)"},
        {"ad", "Ad"},             {"bm", "B/M"},              {"rd", "R&D"},
        {"roa", "ROA"},           {"size", "Size"},           {"ivol", "Ivol"},
        {"gp", "GP"},             {"turn", "Turn"},           {"beta", "Beta"},
        {"illiq", "Illiq"},       {"ag", "AG"},               {"sur", "SUR"},
        {"sue", "SUE"},           {"prof_shock_hvz", "Prof shock (HVZ)"},
        {"prof_shock_vol", "Prof shock (VOL)"},               {"const", "Constant"},
        {"ccis", "CCIs"},         {"ea", "EA"},               {"es", "ES"}};
    auto it = names.find(term);
    if (it != names.end()) return it->second;
    if (term.substr(0, 3) == "L1.") {
        auto base = names.find(term.substr(3));
        if (base != names.end()) return base->second + "(t-1)";
    }
    return std::string(term);
}

RegressionSpec static_spec(const std::string& outcome, const std::string& regressor, const TableOptions& o) {
    RegressionSpec s;
    s.outcome = outcome;
    s.regressor = regressor;
    s.controls = o.controls;
    s.firm_effects = true;
    s.time_effects = o.time_effects;
    s.se = o.static_se;
    return s;
}

RegressionSpec dynamic_spec(const std::string& outcome, const std::string& regressor, const TableOptions& o,
                            bool lagged_controls) {
    RegressionSpec s;
    s.outcome = outcome;
    s.regressor = regressor;
    s.controls = o.controls;
    s.firm_effects = false;
    s.time_effects = TimeEffects::None;
    s.dynamic = true;
    s.lagged_controls = lagged_controls;
    s.gmm = o.gmm;
    s.se = SePolicy::Robust;
    return s;
}

struct TableDef {
    std::string title;
    std::vector<CellPlan> plan;
};

TableDef define(std::string_view name, const TableOptions& o) {
    TableDef d;
    auto pair_table = [&](const std::string& a, const std::string& b) {
        d.plan = {{"static", static_spec("ret_lead", a, o), "", true},
                  {"dynamic", dynamic_spec("ret_lead", a, o, false), "", true},
                  {"static", static_spec("ret_lead", b, o), "", true},
                  {"dynamic", dynamic_spec("ret_lead", b, o, false), "", true}};
    };
    auto split_table = [&](const std::vector<std::string>& vars) {
        for (const auto& v : vars) {
            d.plan.push_back({"high " + v, static_spec("ret_lead", "diff_neg", o), v, true});
            d.plan.push_back({"low " + v, static_spec("ret_lead", "diff_neg", o), v, false});
        }
    };
    if (name == "cnst_cpst") {
        d.title = "Static and dynamic return models: CNST and CPST";
        pair_table("diff_neg", "diff_pos");
    } else if (name == "ost_fst") {
        d.title = "Static and dynamic return models: OST and FST";
        pair_table("diff_star1", "diff_star5");
    } else if (name == "sentiment_split") {
        d.title = "CNST in high and low consumer-confidence periods";
        split_table({"ccis"});
    } else if (name == "growth_value_split") {
        d.title = "CNST by profitability, investment and book-to-market";
        split_table({"roa", "ag", "bm"});
    } else if (name == "transparency_split") {
        d.title = "CNST by earnings aggressiveness and smoothing";
        split_table({"ea", "es"});
    } else if (name == "cash_flow_surprise") {
        d.title = "CNST and cash-flow surprises";
        d.plan = {{"dynamic", dynamic_spec("sur", "diff_neg", o, true), "", true},
                  {"dynamic", dynamic_spec("sue", "diff_neg", o, true), "", true}};
    } else if (name == "profitability_shock") {
        d.title = "CNST and profitability shocks";
        d.plan = {{"dynamic", dynamic_spec("prof_shock_hvz", "diff_neg", o, true), "", true},
                  {"dynamic", dynamic_spec("prof_shock_vol", "diff_neg", o, true), "", true}};
    } else {
        throw Error(fmt::format("unknown table '{}'", name));
    }
    return d;
}

std::string fixed(double v) { return std::isfinite(v) ? fmt::format("{:.4f}", v) : ""; }

std::string optional_fixed(const std::optional<double>& v) { return v ? fixed(*v) : ""; }

// Term names across cells, constant last.
std::vector<std::string> term_rows(const TableResult& t) {
    std::vector<std::string> out;
    bool has_const = false;
    for (const auto& c : t.cells) {
        if (!c.fit) continue;
        for (const auto& term : c.fit->terms) {
            if (term.name == "const") {
                has_const = true;
                continue;
            }
            if (std::find(out.begin(), out.end(), term.name) == out.end()) out.push_back(term.name);
        }
    }
    // Lagged outcomes first, as in the usual layout.
    std::stable_partition(out.begin(), out.end(), [&](const std::string& n) {
        for (const auto& c : t.cells) {
            if (c.fit && c.fit->estimator == "gmm" && n == "L1." + c.outcome) return true;
        }
        return false;
    });
    if (has_const) out.push_back("const");
    return out;
}

std::optional<double> sigma_effect(const TableCell& c) {
    if (!c.fit) return std::nullopt;
    const Term* t = c.fit->find(c.focus);
    auto sd = c.fit->sd_of(c.focus);
    if (!t || !sd) return std::nullopt;
    return t->coef * *sd;
}

}  // namespace

const std::vector<std::string>& table_names() {
    static const std::vector<std::string> names = {"cnst_cpst",          "ost_fst",
                                                   "sentiment_split",    "growth_value_split",
                                                   "transparency_split", "cash_flow_surprise",
                                                   "profitability_shock"};
    return names;
}

std::string stars(double t) {
    if (!std::isfinite(t)) return "";
    const double p = linalg::two_sided_p(t);
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.10) return "*";
    return "";
}

TableResult run_table(const PanelDataset& p, std::string_view name, const TableOptions& options) {
    TableDef def = define(name, options);
    TableResult out;
    out.name = std::string(name);
    out.title = def.title;
    for (const auto& plan : def.plan) {
        TableCell cell;
        cell.label = plan.label;
        cell.outcome = plan.spec.outcome;
        cell.focus = plan.spec.regressor;
        try {
            if (plan.split_variable.empty()) {
                cell.fit = estimate(p, plan.spec);
            } else {
                std::vector<std::string> needed = static_regressors(plan.spec);
                needed.push_back(plan.spec.outcome);
                const auto estimable = complete_rows(p, needed);
                const SplitResult split = median_split(p, plan.split_variable, estimable);
                const auto& rows = plan.high ? split.high : split.low;
                if (rows.empty()) throw InsufficientDataError("empty subsample");
                cell.fit = estimate(p, plan.spec, rows);
            }
        } catch (const InsufficientDataError&) {
            cell.error = "insufficient data";
        } catch (const std::exception& e) {
            cell.error = fmt::format("error: {}", e.what());
        }
        out.cells.push_back(std::move(cell));
    }
    return out;
}

TableResult single_fit_table(const FitResult& fit, std::string label) {
    TableResult t;
    t.name = "regress";
    t.title = "Regression of " + display_name(fit.spec.outcome);
    TableCell c;
    c.label = std::move(label);
    c.outcome = fit.spec.outcome;
    c.focus = fit.spec.regressor;
    c.fit = fit;
    t.cells.push_back(std::move(c));
    return t;
}

std::string table_csv(const TableResult& table) {
    std::ostringstream out;
    std::vector<std::string> header = {"term", "stat"};
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
        header.push_back(fmt::format("({}) {} {}", i + 1, table.cells[i].label, table.cells[i].outcome));
    }
    csv::write_row(out, header);
    auto row = [&](const std::string& term, const std::string& stat, auto value) {
        std::vector<std::string> f = {term, stat};
        for (const auto& c : table.cells) f.push_back(value(c));
        csv::write_row(out, f);
    };
    for (const auto& term : term_rows(table)) {
        auto stat = [&](auto get) {
            return [&, get](const TableCell& c) -> std::string {
                if (!c.fit) return "";
                const Term* t = c.fit->find(term);
                return t ? csv::format_number(get(*t)) : "";
            };
        };
        row(term, "coef", stat([](const Term& t) { return t.coef; }));
        row(term, "se", stat([](const Term& t) { return t.se; }));
        row(term, "t", stat([](const Term& t) { return t.t; }));
    }
    auto count = [](auto get) {
        return [get](const TableCell& c) -> std::string { return c.fit ? std::to_string(get(*c.fit)) : ""; };
    };
    auto opt = [](auto get) {
        return [get](const TableCell& c) -> std::string {
            if (!c.fit) return "";
            std::optional<double> v = get(*c.fit);
            return csv::format_optional(v);
        };
    };
    row("n_obs", "", count([](const FitResult& f) { return f.n_obs; }));
    row("n_firms", "", count([](const FitResult& f) { return f.n_firms; }));
    row("firm_fe", "", [](const TableCell& c) -> std::string {
        return c.fit ? (c.fit->estimator == "fe" && c.fit->spec.firm_effects ? "yes" : "no") : "";
    });
    row("time_fe", "", [](const TableCell& c) -> std::string {
        return c.fit ? std::string(c.fit->estimator == "fe" ? to_string(c.fit->spec.time_effects) : "none") : "";
    });
    row("n_instruments", "", [](const TableCell& c) -> std::string {
        return c.fit && c.fit->estimator == "gmm" ? std::to_string(c.fit->n_instruments) : "";
    });
    row("ar1_p", "", opt([](const FitResult& f) { return f.ar1_p; }));
    row("ar2_p", "", opt([](const FitResult& f) { return f.ar2_p; }));
    row("focus_sd", "", [](const TableCell& c) -> std::string {
        return c.fit ? csv::format_optional(c.fit->sd_of(c.focus)) : "";
    });
    row("focus_sigma_effect", "", [](const TableCell& c) { return csv::format_optional(sigma_effect(c)); });
    row("dropped", "", [](const TableCell& c) -> std::string {
        if (!c.fit) return "";
        std::string s;
        for (const auto& d : c.fit->dropped_columns) s += (s.empty() ? "" : ";") + d;
        return s;
    });
    row("warnings", "", [](const TableCell& c) -> std::string {
        if (!c.fit) return "";
        std::string s;
        for (const auto& w : c.fit->warnings) s += (s.empty() ? "" : "; ") + w;
        return s;
    });
    row("error", "", [](const TableCell& c) { return c.error; });
    return out.str();
}

std::string tables_markdown(const std::vector<TableResult>& tables) {
    std::ostringstream out;
    out << "# Regression tables\n\n"
        << "Coefficients with t-statistics in parentheses. * p<0.10, ** p<0.05, *** p<0.01 "
           "(two-sided normal).\n";
    for (const auto& table : tables) {
        out << "\n## " << table.title << "\n\n|  |";
        for (std::size_t i = 0; i < table.cells.size(); ++i) {
            out << " (" << i + 1 << ") " << table.cells[i].label << " |";
        }
        out << "\n|---|";
        for (std::size_t i = 0; i < table.cells.size(); ++i) out << "---:|";
        out << "\n| Dependent |";
        for (const auto& c : table.cells) out << ' ' << display_name(c.outcome) << " |";
        out << '\n';
        for (const auto& term : term_rows(table)) {
            out << "| " << display_name(term) << " |";
            for (const auto& c : table.cells) {
                const Term* t = c.fit ? c.fit->find(term) : nullptr;
                out << ' ' << (t ? fixed(t->coef) + stars(t->t) : "") << " |";
            }
            out << "\n|  |";
            for (const auto& c : table.cells) {
                const Term* t = c.fit ? c.fit->find(term) : nullptr;
                out << ' ' << (t && std::isfinite(t->t) ? "(" + fixed(t->t) + ")" : "") << " |";
            }
            out << '\n';
        }
        auto line = [&](std::string_view label, auto value) {
            out << "| " << label << " |";
            for (const auto& c : table.cells) out << ' ' << value(c) << " |";
            out << '\n';
        };
        line("Observations", [](const TableCell& c) { return c.fit ? std::to_string(c.fit->n_obs) : std::string(); });
        line("Firms", [](const TableCell& c) { return c.fit ? std::to_string(c.fit->n_firms) : std::string(); });
        line("Year FE", [](const TableCell& c) -> std::string {
            return c.fit && c.fit->estimator == "fe" && c.fit->spec.time_effects == TimeEffects::Year ? "YES" : "";
        });
        line("Week FE", [](const TableCell& c) -> std::string {
            return c.fit && c.fit->estimator == "fe" && c.fit->spec.time_effects == TimeEffects::Week ? "YES" : "";
        });
        line("Firm FE", [](const TableCell& c) -> std::string {
            return c.fit && c.fit->estimator == "fe" && c.fit->spec.firm_effects ? "YES" : "";
        });
        line("AR(1) p-value", [](const TableCell& c) { return c.fit ? optional_fixed(c.fit->ar1_p) : std::string(); });
        line("AR(2) p-value", [](const TableCell& c) { return c.fit ? optional_fixed(c.fit->ar2_p) : std::string(); });
        line("One-sigma effect of focus regressor", [](const TableCell& c) {
            auto e = sigma_effect(c);
            return e ? fmt::format("{:.6f}", *e) : std::string();
        });
        bool any_note = false;
        for (const auto& c : table.cells) any_note = any_note || !c.error.empty() || (c.fit && !c.fit->warnings.empty());
        if (any_note) {
            line("Notes", [](const TableCell& c) {
                if (!c.error.empty()) return c.error;
                std::string s;
                if (c.fit) {
                    for (const auto& w : c.fit->warnings) s += (s.empty() ? "" : "; ") + w;
                }
                return s;
            });
        }
    }
    return out.str();
}

}  // namespace revpanel::econ
