#include "revpanel/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "revpanel/csv.hpp"
#include "revpanel/error.hpp"
#include "revpanel/least_squares.hpp"

namespace revpanel::chars {

namespace {

std::optional<double> ratio(const std::optional<double>& num, const std::optional<double>& den) {
    if (!num || !den || *den == 0.0) return std::nullopt;
    return *num / *den;
}

// Near-zero dispersion test used for denominators that are standard
// deviations of ratio series.
bool negligible_sd(double sd, std::span<const double> v) {
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    return !(sd > 1e-14 * std::max(scale, 1e-300));
}

const QuarterlyFinancials* find_quarter(const FirmFinancials& f, std::int64_t ordinal) {
    auto it = f.find(ordinal);
    return it == f.end() ? nullptr : &it->second;
}

}  // namespace

// ------------------------------------------------------- market controls

std::optional<double> compute_ivol(std::span<const double> returns, std::span<const double> mkt,
                                   std::span<const double> smb, std::span<const double> hml) {
    const std::size_t n = returns.size();
    if (mkt.size() != n || smb.size() != n || hml.size() != n) {
        throw Error("compute_ivol: misaligned inputs");
    }
    if (n < 4) return std::nullopt;
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 4);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t d = 0; d < n; ++d) {
        auto i = static_cast<Eigen::Index>(d);
        x(i, 0) = 1.0;
        x(i, 1) = mkt[d];
        x(i, 2) = smb[d];
        x(i, 3) = hml[d];
        y(i) = returns[d];
    }
    // A degenerate factor week (e.g. all-zero factors) still has a
    // well-defined least-squares fit; take the minimum-norm solution.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
    cod.setThreshold(1e-12);
    Eigen::VectorXd resid = y - x * cod.solve(y);
    std::vector<double> e(resid.data(), resid.data() + resid.size());
    return linalg::sample_sd(e);
}

std::optional<double> compute_beta(std::span<const double> stock, std::span<const double> market,
                                   std::size_t min_obs) {
    const std::size_t n = stock.size();
    if (market.size() != n) throw Error("compute_beta: misaligned inputs");
    if (n < std::max<std::size_t>(min_obs, 2)) return std::nullopt;
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t d = 0; d < n; ++d) {
        auto i = static_cast<Eigen::Index>(d);
        x(i, 0) = 1.0;
        x(i, 1) = market[d];
        y(i) = stock[d];
    }
    try {
        return linalg::solve(x, y, {"const", "mkt"}).coef(1);
    } catch (const RankDeficientError&) {
        return std::nullopt;
    }
}

std::optional<double> compute_illiq(std::span<const double> returns, std::span<const double> volume,
                                    double scale) {
    if (returns.size() != volume.size()) throw Error("compute_illiq: misaligned inputs");
    double sum = 0.0;
    std::size_t days = 0;
    for (std::size_t d = 0; d < returns.size(); ++d) {
        if (!(volume[d] > 0.0)) continue;
        sum += std::abs(returns[d]) / volume[d];
        ++days;
    }
    if (days == 0) return std::nullopt;
    return scale * sum / static_cast<double>(days);
}

double compound_return(std::span<const double> daily) {
    double g = 1.0;
    for (double r : daily) g *= 1.0 + r;
    return g - 1.0;
}

// ------------------------------------------------------ simple controls

std::optional<double> size_from_cap(double tradable_cap) {
    if (!(tradable_cap > 0.0)) return std::nullopt;
    return std::log(tradable_cap);
}

std::optional<double> roa(const QuarterlyFinancials& q) { return ratio(q.net_profit, q.total_assets); }

std::optional<double> book_to_market(const QuarterlyFinancials& q) {
    return ratio(q.book_equity, q.market_value);
}

std::optional<double> gross_profitability(const QuarterlyFinancials& q) {
    return ratio(q.pre_extraordinary_income, q.total_assets);
}

std::optional<double> asset_growth(const QuarterlyFinancials& q, const QuarterlyFinancials& prev) {
    auto r = ratio(q.total_assets, prev.total_assets);
    if (!r) return std::nullopt;
    return *r - 1.0;
}

std::optional<double> advertising(const QuarterlyFinancials& q) {
    return ratio(q.sales_expense, q.operating_revenue);
}

std::optional<double> research(const QuarterlyFinancials& q) {
    return ratio(q.rd_expense, q.operating_revenue);
}

// --------------------------------------------------------- transparency

std::map<int, AnnualFinancials> annualize(const FirmFinancials& quarters) {
    std::map<int, AnnualFinancials> out;
    if (quarters.empty()) return out;
    const int first_year = quarters.begin()->second.quarter.year;
    const int last_year = quarters.rbegin()->second.quarter.year;
    for (int y = first_year; y <= last_year; ++y) {
        AnnualFinancials a;
        a.year = y;
        std::array<const QuarterlyFinancials*, 4> qs{};
        bool complete = true;
        for (int q = 1; q <= 4; ++q) {
            qs[static_cast<std::size_t>(q - 1)] = find_quarter(quarters, Quarter{y, q}.ordinal());
            complete = complete && qs[static_cast<std::size_t>(q - 1)] != nullptr;
        }
        if (qs[3] && qs[3]->total_assets) a.total_assets = qs[3]->total_assets;
        if (complete) {
            auto sum = [&](auto member) -> std::optional<double> {
                double s = 0.0;
                for (const auto* q : qs) {
                    const auto& v = q->*member;
                    if (!v) return std::nullopt;
                    s += *v;
                }
                return s;
            };
            a.net_income = sum(&QuarterlyFinancials::net_profit);
            a.cfo = sum(&QuarterlyFinancials::cfo);
            a.accruals = sum(&QuarterlyFinancials::accruals);
            if (!a.accruals && a.net_income && a.cfo) {
                a.accruals = *a.net_income - *a.cfo;
                a.accruals_derived = true;
            }
        }
        out.emplace(y, a);
    }
    return out;
}

std::optional<double> compute_ea(const std::map<int, AnnualFinancials>& years, int year) {
    auto cur = years.find(year);
    auto prev = years.find(year - 1);
    if (cur == years.end() || prev == years.end()) return std::nullopt;
    const auto& ta = prev->second.total_assets;
    if (!cur->second.accruals || !ta || !(*ta > 0.0)) return std::nullopt;
    return *cur->second.accruals / *ta;
}

std::optional<double> compute_es(const std::map<int, AnnualFinancials>& years, int year) {
    std::vector<double> cfo_ratio;
    std::vector<double> ni_ratio;
    for (int k = 3; k >= 0; --k) {
        auto cur = years.find(year - k);
        auto lag = years.find(year - k - 1);
        if (cur == years.end() || lag == years.end()) return std::nullopt;
        const auto& a = lag->second.total_assets;
        if (!cur->second.cfo || !cur->second.net_income || !a || *a == 0.0) return std::nullopt;
        cfo_ratio.push_back(*cur->second.cfo / *a);
        ni_ratio.push_back(*cur->second.net_income / *a);
    }
    auto sd_cfo = linalg::sample_sd(cfo_ratio);
    auto sd_ni = linalg::sample_sd(ni_ratio);
    if (!sd_cfo || !sd_ni || negligible_sd(*sd_ni, ni_ratio)) return std::nullopt;
    return *sd_cfo / *sd_ni;
}

// ------------------------------------------------------------ surprises

namespace {

template <typename Value>
std::optional<double> standardized_change(const FirmFinancials& f, Quarter q, SurpriseWindow w,
                                          Value value, bool scale_by_changes) {
    auto at = [&](std::int64_t ord) -> std::optional<double> {
        const auto* row = find_quarter(f, ord);
        return row ? value(*row) : std::nullopt;
    };
    const std::int64_t t = q.ordinal();
    auto now = at(t);
    auto year_ago = at(t - 4);
    if (!now || !year_ago) return std::nullopt;
    std::vector<double> history;
    for (std::int64_t k = t - w.quarters; k <= t - 1; ++k) {
        auto v = at(k);
        if (!v) continue;
        if (scale_by_changes) {
            auto base = at(k - 4);
            if (!base) continue;
            history.push_back(*v - *base);
        } else {
            history.push_back(*v);
        }
    }
    if (static_cast<int>(history.size()) < std::max(w.min_quarters, 2)) return std::nullopt;
    auto sd = linalg::sample_sd(history);
    if (!sd || negligible_sd(*sd, history)) return std::nullopt;
    return (*now - *year_ago) / *sd;
}

}  // namespace

std::optional<double> compute_sur(const FirmFinancials& f, Quarter q, SurpriseWindow w) {
    return standardized_change(
        f, q, w, [](const QuarterlyFinancials& r) { return r.revenue_per_share; }, true);
}

std::optional<double> compute_sue(const FirmFinancials& f, Quarter q, SurpriseWindow w) {
    return standardized_change(
        f, q, w, [](const QuarterlyFinancials& r) { return r.operating_profit; }, false);
}

std::optional<double> clamp_symmetric(std::optional<double> v, std::optional<double> bound) {
    if (!v || !bound) return v;
    return std::clamp(*v, -*bound, *bound);
}

// --------------------------------------------------------- profit models

std::string_view to_string(ProfitModel m) { return m == ProfitModel::Hvz ? "hvz" : "vol"; }

std::vector<std::string> profit_columns(ProfitModel m) {
    std::vector<std::string> cols = {"const", "va", "dd", "db", "prof"};
    if (m == ProfitModel::Vol) cols.push_back("vol");
    return cols;
}

std::optional<double> earnings_volatility(const FirmFinancials& f, Quarter q, VolWindow w) {
    std::vector<double> history;
    for (std::int64_t k = q.ordinal() - w.quarters + 1; k <= q.ordinal(); ++k) {
        const auto* row = find_quarter(f, k);
        if (!row) continue;
        if (auto r = roa(*row)) history.push_back(*r);
    }
    if (static_cast<int>(history.size()) < std::max(w.min_quarters, 2)) return std::nullopt;
    return linalg::sample_sd(history);
}

std::optional<ProfitRegressors> profit_regressors(const FirmFinancials& f, Quarter q, VolWindow w) {
    const auto* row = find_quarter(f, q.ordinal());
    if (!row) return std::nullopt;
    auto va = ratio(row->market_value, row->total_assets);
    auto db = ratio(row->dividends, row->book_value);
    auto prof = roa(*row);
    if (!va || !db || !prof || !row->pays_dividend) return std::nullopt;
    ProfitRegressors x;
    x.va = *va;
    x.dd = *row->pays_dividend ? 0.0 : 1.0;
    x.db = *db;
    x.prof = *prof;
    x.vol = earnings_volatility(f, q, w);
    return x;
}

namespace {

Eigen::RowVectorXd design_row(const ProfitRegressors& x, ProfitModel m) {
    Eigen::RowVectorXd r(m == ProfitModel::Vol ? 6 : 5);
    r << 1.0, x.va, x.dd, x.db, x.prof;
    if (m == ProfitModel::Vol) r(5) = x.vol.value_or(std::nan(""));
    return r;
}

}  // namespace

double ProfitModelFit::predict(const ProfitRegressors& x) const {
    const auto full = profit_columns(model);
    const Eigen::RowVectorXd row = design_row(x, model);
    double y = 0.0;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        auto pos = std::find(full.begin(), full.end(), columns[j]) - full.begin();
        y += coef(static_cast<Eigen::Index>(j)) * row(pos);
    }
    return y;
}

ProfitModelFit fit_profit_model(const std::vector<ProfitObservation>& cross_section, Quarter q,
                                ProfitModel model) {
    const auto names = profit_columns(model);
    const std::size_t p = names.size();
    if (cross_section.size() < p + 5) {
        throw InsufficientDataError(fmt::format("{} model for {}: {} firms, need at least {}",
                                                to_string(model), format_quarter(q),
                                                cross_section.size(), p + 5));
    }
    const auto n = static_cast<Eigen::Index>(cross_section.size());
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(p));
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& obs = cross_section[static_cast<std::size_t>(i)];
        if (model == ProfitModel::Vol && !obs.x.vol) {
            throw Error("VOL model observation without earnings volatility");
        }
        x.row(i) = design_row(obs.x, model);
        y(i) = obs.prof_next;
    }
    ProfitModelFit fit;
    fit.quarter = q;
    fit.model = model;
    fit.n_firms = cross_section.size();
    std::vector<Eigen::Index> keep;
    const auto constant = linalg::constant_columns(x);
    for (std::size_t j = 0; j < p; ++j) {
        bool is_const = std::find(constant.begin(), constant.end(), j) != constant.end();
        if (j > 0 && is_const) {
            fit.dropped.push_back(names[j]);
        } else {
            keep.push_back(static_cast<Eigen::Index>(j));
            fit.columns.push_back(names[j]);
        }
    }
    Eigen::MatrixXd xk(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) xk.col(static_cast<Eigen::Index>(j)) = x.col(keep[j]);
    fit.coef = linalg::solve(xk, y, fit.columns).coef;
    return fit;
}

std::vector<ProfitObservation> profit_cross_section(const FinancialHistory& h, Quarter q,
                                                    ProfitModel model, VolWindow w) {
    std::vector<ProfitObservation> out;
    const Quarter next = Quarter::from_ordinal(q.ordinal() + 1);
    for (const auto& [firm, f] : h) {
        auto x = profit_regressors(f, q, w);
        if (!x || (model == ProfitModel::Vol && !x->vol)) continue;
        const auto* nx = find_quarter(f, next.ordinal());
        if (!nx) continue;
        auto prof_next = roa(*nx);
        if (!prof_next) continue;
        out.push_back({firm, *x, *prof_next});
    }
    return out;
}

std::map<std::int64_t, ProfitModelFit> fit_all_quarters(const FinancialHistory& h, ProfitModel model,
                                                        VolWindow w) {
    std::int64_t lo = INT64_MAX;
    std::int64_t hi = INT64_MIN;
    for (const auto& [firm, f] : h) {
        if (f.empty()) continue;
        lo = std::min(lo, f.begin()->first);
        hi = std::max(hi, f.rbegin()->first);
    }
    std::map<std::int64_t, ProfitModelFit> fits;
    for (std::int64_t t = lo; t < hi; ++t) {
        const Quarter q = Quarter::from_ordinal(t);
        auto cs = profit_cross_section(h, q, model, w);
        try {
            fits.emplace(t, fit_profit_model(cs, q, model));
        } catch (const Error& e) {
            // Shocks that need this quarter stay missing.
            spdlog::debug("{}", e.what());
        }
    }
    return fits;
}

std::optional<double> profitability_shock(const FirmFinancials& f, Quarter target, ProfitModel model,
                                          const std::map<std::int64_t, ProfitModelFit>& fits,
                                          VolWindow w) {
    const std::int64_t t = target.ordinal();
    auto fit = fits.find(t - 2);
    if (fit == fits.end()) return std::nullopt;
    auto x = profit_regressors(f, Quarter::from_ordinal(t - 1), w);
    if (!x || (model == ProfitModel::Vol && !x->vol)) return std::nullopt;
    const auto* realized_row = find_quarter(f, t);
    if (!realized_row) return std::nullopt;
    auto realized = roa(*realized_row);
    if (!realized) return std::nullopt;
    return *realized - fit->second.predict(*x);
}

// ------------------------------------------------- frequency conversion

std::vector<std::optional<double>> to_weekly(std::vector<Period> periods,
                                             const std::vector<WeekIndex>& weeks, int lag_weeks) {
    std::sort(periods.begin(), periods.end(),
              [](const Period& a, const Period& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < periods.size(); ++i) {
        if (periods[i].last < periods[i].first) throw Error("to_weekly: period ends before it starts");
        if (i > 0 && periods[i].first <= periods[i - 1].last) throw Error("to_weekly: overlapping periods");
    }
    std::vector<std::optional<double>> out;
    out.reserve(weeks.size());
    for (const auto& w : weeks) {
        const Date anchor = WeekIndex::from_ordinal(w.ordinal() - lag_weeks).monday();
        auto it = std::upper_bound(periods.begin(), periods.end(), anchor,
                                   [](Date d, const Period& p) { return d < p.first; });
        if (it == periods.begin()) {
            out.emplace_back();
            continue;
        }
        --it;
        out.push_back(anchor <= it->last ? std::optional<double>(it->value) : std::nullopt);
    }
    return out;
}

// ------------------------------------------------------ weekly assembly

const std::vector<std::string>& control_columns() {
    static const std::vector<std::string> cols = {
        "ret",  "size", "bm",  "roa", "ivol", "ag", "illiq", "beta", "gp", "turn",
        "ad",   "rd",   "ccis", "ea", "es",   "sur", "sue",  "prof_shock_hvz", "prof_shock_vol"};
    return cols;
}

namespace {

std::optional<double> ControlRow::*control_member(std::string_view column) {
    static const std::unordered_map<std::string_view, std::optional<double> ControlRow::*> members = {
        {"ret", &ControlRow::ret},     {"size", &ControlRow::size},
        {"bm", &ControlRow::bm},       {"roa", &ControlRow::roa},
        {"ivol", &ControlRow::ivol},   {"ag", &ControlRow::ag},
        {"illiq", &ControlRow::illiq}, {"beta", &ControlRow::beta},
        {"gp", &ControlRow::gp},       {"turn", &ControlRow::turn},
        {"ad", &ControlRow::ad},       {"rd", &ControlRow::rd},
        {"ccis", &ControlRow::ccis},   {"ea", &ControlRow::ea},
        {"es", &ControlRow::es},       {"sur", &ControlRow::sur},
        {"sue", &ControlRow::sue},     {"prof_shock_hvz", &ControlRow::prof_shock_hvz},
        {"prof_shock_vol", &ControlRow::prof_shock_vol}};
    auto it = members.find(column);
    if (it == members.end()) throw Error(fmt::format("unknown control column '{}'", column));
    return it->second;
}

}  // namespace

std::optional<double> control_value(const ControlRow& row, std::string_view column) {
    return row.*control_member(column);
}

void set_control_value(ControlRow& row, std::string_view column, std::optional<double> v) {
    row.*control_member(column) = v;
}

ControlsResult build_controls(const MarketInputs& inputs, const CharacteristicsOptions& options) {
    ControlsResult result;

    std::unordered_map<std::int64_t, std::size_t> factor_at;
    for (std::size_t i = 0; i < inputs.factors.size(); ++i) {
        factor_at.emplace(inputs.factors[i].date.time_since_epoch().count(), i);
    }

    std::vector<Period> ccis_periods;
    for (const auto& c : inputs.ccis) {
        ccis_periods.push_back({c.month.first_day(), c.month.last_day(), c.value});
    }

    const auto hvz_fits = fit_all_quarters(inputs.financials, ProfitModel::Hvz, options.vol);
    const auto vol_fits = fit_all_quarters(inputs.financials, ProfitModel::Vol, options.vol);
    static const FirmFinancials kNoFinancials;

    for (const auto& [firm, bars] : inputs.market) {
        if (bars.empty()) continue;
        const std::int64_t w_first = assign_week(bars.front().date, options.convention).ordinal();
        const std::int64_t w_last = assign_week(bars.back().date, options.convention).ordinal();
        std::vector<WeekIndex> weeks;
        for (std::int64_t w = w_first; w <= w_last; ++w) weeks.push_back(WeekIndex::from_ordinal(w));

        std::vector<ControlRow> rows(weeks.size());
        for (std::size_t i = 0; i < weeks.size(); ++i) {
            rows[i].firm_id = firm;
            rows[i].week = weeks[i];
        }

        // Daily-data controls.
        std::size_t b = 0;
        for (std::size_t i = 0; i < weeks.size(); ++i) {
            std::vector<double> r, vol, turn, fr, fm, fs, fh;
            std::size_t last_bar = SIZE_MAX;
            while (b < bars.size() && assign_week(bars[b].date, options.convention).ordinal() ==
                                          weeks[i].ordinal()) {
                const auto& bar = bars[b];
                r.push_back(bar.ret);
                vol.push_back(bar.volume);
                turn.push_back(bar.turnover);
                if (auto f = factor_at.find(bar.date.time_since_epoch().count()); f != factor_at.end()) {
                    const auto& fd = inputs.factors[f->second];
                    fr.push_back(bar.ret);
                    fm.push_back(fd.mkt);
                    fs.push_back(fd.smb);
                    fh.push_back(fd.hml);
                }
                last_bar = b;
                ++b;
            }
            if (r.empty()) continue;
            auto& row = rows[i];
            row.ret = compound_return(r);
            row.size = size_from_cap(bars[last_bar].tradable_cap);
            row.turn = linalg::mean(turn);
            row.illiq = compute_illiq(r, vol, options.illiq_scale);
            row.ivol = compute_ivol(fr, fm, fs, fh);

            std::vector<double> bs, bm;
            for (std::size_t k = last_bar + 1; k-- > 0 && bs.size() < options.beta_window;) {
                auto f = factor_at.find(bars[k].date.time_since_epoch().count());
                if (f == factor_at.end()) continue;
                bs.push_back(bars[k].ret);
                bm.push_back(inputs.factors[f->second].mkt);
            }
            row.beta = compute_beta(bs, bm, options.beta_min_obs);
        }

        // Quarterly and annual fundamentals, expanded to weeks.
        auto fin_it = inputs.financials.find(firm);
        const FirmFinancials& fin = fin_it == inputs.financials.end() ? kNoFinancials : fin_it->second;

        auto expand_quarterly = [&](auto value_fn, std::string_view column) {
            std::vector<Period> periods;
            for (const auto& [ord, q] : fin) {
                if (auto v = value_fn(q)) periods.push_back({q.quarter.first_day(), q.quarter.last_day(), *v});
            }
            auto weekly = to_weekly(periods, weeks, options.publication_lag_weeks);
            for (std::size_t i = 0; i < rows.size(); ++i) set_control_value(rows[i], column, weekly[i]);
        };
        expand_quarterly([](const QuarterlyFinancials& q) { return roa(q); }, "roa");
        expand_quarterly([](const QuarterlyFinancials& q) { return book_to_market(q); }, "bm");
        expand_quarterly([](const QuarterlyFinancials& q) { return gross_profitability(q); }, "gp");
        expand_quarterly([](const QuarterlyFinancials& q) { return advertising(q); }, "ad");
        expand_quarterly([](const QuarterlyFinancials& q) { return research(q); }, "rd");
        expand_quarterly(
            [&](const QuarterlyFinancials& q) -> std::optional<double> {
                const auto* prev = find_quarter(fin, q.quarter.ordinal() - 1);
                return prev ? asset_growth(q, *prev) : std::nullopt;
            },
            "ag");
        expand_quarterly(
            [&](const QuarterlyFinancials& q) {
                return clamp_symmetric(compute_sur(fin, q.quarter, options.surprise), options.surprise_clamp);
            },
            "sur");
        expand_quarterly(
            [&](const QuarterlyFinancials& q) {
                return clamp_symmetric(compute_sue(fin, q.quarter, options.surprise), options.surprise_clamp);
            },
            "sue");
        expand_quarterly(
            [&](const QuarterlyFinancials& q) {
                return profitability_shock(fin, q.quarter, ProfitModel::Hvz, hvz_fits, options.vol);
            },
            "prof_shock_hvz");
        expand_quarterly(
            [&](const QuarterlyFinancials& q) {
                return profitability_shock(fin, q.quarter, ProfitModel::Vol, vol_fits, options.vol);
            },
            "prof_shock_vol");

        const auto years = annualize(fin);
        std::vector<Period> ea_periods, es_periods;
        for (const auto& [y, a] : years) {
            const Date first = Quarter{y, 1}.first_day();
            const Date last = Quarter{y, 4}.last_day();
            if (a.accruals_derived) ++result.derived_accrual_years;
            if (auto v = compute_ea(years, y)) ea_periods.push_back({first, last, *v});
            if (auto v = compute_es(years, y)) es_periods.push_back({first, last, *v});
        }
        auto ea = to_weekly(ea_periods, weeks, options.publication_lag_weeks);
        auto es = to_weekly(es_periods, weeks, options.publication_lag_weeks);
        auto cc = to_weekly(ccis_periods, weeks, options.publication_lag_weeks);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            rows[i].ea = ea[i];
            rows[i].es = es[i];
            rows[i].ccis = cc[i];
        }
        std::move(rows.begin(), rows.end(), std::back_inserter(result.rows));
    }
    return result;
}

void write_controls_csv(const std::filesystem::path& path, const std::vector<ControlRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    std::vector<std::string> header = {"firm_id", "iso_year", "iso_week"};
    for (const auto& c : control_columns()) header.push_back(c);
    csv::write_row(out, header);
    for (const auto& r : rows) {
        std::vector<std::string> f = {r.firm_id, std::to_string(r.week.year), std::to_string(r.week.week)};
        for (const auto& c : control_columns()) f.push_back(csv::format_optional(control_value(r, c)));
        csv::write_row(out, f);
    }
}

}  // namespace revpanel::chars
