#pragma once

// Random and degenerate inputs for the accounting formulas, evaluated both
// by the library and by the direct oracles in oracles.hpp.

#include <cmath>
#include <optional>
#include <random>
#include <string>

#include "oracles.hpp"
#include "revpanel/characteristics.hpp"

namespace fundamentals {

using namespace revpanel;

struct Report {
    std::size_t compared = 0;        // evaluations where both sides agree on presence
    std::size_t present = 0;         // of which had a value
    std::size_t presence_mismatch = 0;
    double max_abs_diff = 0.0;
    std::size_t degenerate_cases = 0;
    std::string first_failure;

    void check(const std::string& what, std::optional<double> lib, std::optional<double> ref) {
        if (lib.has_value() != ref.has_value()) {
            ++presence_mismatch;
            if (first_failure.empty()) first_failure = what + ": presence differs";
            return;
        }
        ++compared;
        if (!lib) return;
        ++present;
        const double d = std::abs(*lib - *ref);
        if (!(d <= max_abs_diff)) max_abs_diff = std::isnan(d) ? INFINITY : d;
        if (!(d <= 1e-12) && first_failure.empty()) first_failure = what + ": value differs";
    }
    bool ok(double tol = 1e-12) const { return presence_mismatch == 0 && max_abs_diff <= tol; }
};

inline constexpr int kFirstYear = 2008;
inline constexpr int kYears = 6;

// One firm's quarterly history in both representations.
struct Firm {
    chars::FirmFinancials lib;
    oracle::Quarterly ref;
    std::map<long, oracle::ProfitRow> profit;  // quarter -> regressors
    std::map<long, double> roa;
};

enum class Degenerate { None, ConstantNiRatio, ConstantRevenueGrowth, ConstantEarnings, MissingHistory, AllPayDividends };

inline Firm make_firm(std::mt19937_64& gen, Degenerate kind) {
    std::normal_distribution<double> n01(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Firm f;
    double ta = 100.0 * std::exp(0.3 * n01(gen));
    double rev = 2.0;
    for (int y = kFirstYear; y < kFirstYear + kYears; ++y) {
        for (int q = 1; q <= 4; ++q) {
            const Quarter qq{y, q};
            const long t = static_cast<long>(qq.ordinal());
            if (kind == Degenerate::MissingHistory && u01(gen) < 0.25) continue;
            if (kind == Degenerate::None && u01(gen) < 0.03) continue;
            chars::QuarterlyFinancials row;
            row.quarter = qq;
            ta *= 1.0 + 0.03 * n01(gen);
            double ni = ta * (0.01 + 0.01 * n01(gen));
            double cfo = ni + ta * 0.01 * n01(gen);
            double total_assets = ta;
            if (kind == Degenerate::ConstantNiRatio) {
                // Exact: assets fixed at 100 and each quarter's profit 1.25.
                total_assets = 100.0;
                ni = 1.25;
            }
            rev = rev * (1.0 + 0.05 * n01(gen));
            double rev_q = rev;
            if (kind == Degenerate::ConstantRevenueGrowth) rev_q = 2.0 + 0.5 * (y - kFirstYear) + 0.125 * q;
            double op = 1.2 * ni + 0.1 * n01(gen);
            if (kind == Degenerate::ConstantEarnings) op = 3.5;
            row.total_assets = total_assets;
            row.net_profit = ni;
            row.cfo = cfo;
            row.accruals = ni - cfo + 0.001 * n01(gen);
            row.revenue_per_share = rev_q;
            row.operating_profit = op;
            row.market_value = total_assets * (0.5 + u01(gen));
            row.book_value = total_assets * (0.3 + 0.2 * u01(gen));
            const bool pays = kind == Degenerate::AllPayDividends || u01(gen) < 0.6;
            row.pays_dividend = pays;
            row.dividends = pays ? *row.book_value * 0.03 * u01(gen) : 0.0;
            f.lib.emplace(t, row);

            f.ref.ta[t] = total_assets;
            f.ref.ni[t] = ni;
            f.ref.cfo[t] = cfo;
            f.ref.acc[t] = *row.accruals;
            f.ref.rev[t] = rev_q;
            f.ref.earnings[t] = op;
            f.roa[t] = ni / total_assets;
            f.profit[t] = {*row.market_value / total_assets, pays ? 0.0 : 1.0, *row.dividends / *row.book_value,
                           ni / total_assets, std::nullopt};
        }
    }
    for (auto& [t, p] : f.profit) {
        std::vector<double> h;
        for (long k = t - 7; k <= t; ++k)
            if (auto it = f.roa.find(k); it != f.roa.end()) h.push_back(it->second);
        if (h.size() >= 6) p.vol = oracle::two_pass_sd(h);
    }
    return f;
}

// EA, ES, SUR and SUE for every year and quarter of `cases` random firms,
// a share of them degenerate.
inline void check_transparency_and_surprises(std::uint64_t seed, int cases, Report& report) {
    std::mt19937_64 gen(seed);
    const Degenerate kinds[] = {Degenerate::ConstantNiRatio, Degenerate::ConstantRevenueGrowth,
                                Degenerate::ConstantEarnings, Degenerate::MissingHistory};
    for (int c = 0; c < cases; ++c) {
        Degenerate kind = Degenerate::None;
        if (c % 5 == 4) {
            kind = kinds[(c / 5) % 4];
            ++report.degenerate_cases;
        }
        const Firm f = make_firm(gen, kind);
        const auto years = chars::annualize(f.lib);
        const std::string tag = "case " + std::to_string(c);
        for (int y = kFirstYear; y < kFirstYear + kYears; ++y) {
            report.check(tag + " ea " + std::to_string(y), chars::compute_ea(years, y), oracle::ea(f.ref, y));
            report.check(tag + " es " + std::to_string(y), chars::compute_es(years, y), oracle::es(f.ref, y));
            for (int q = 1; q <= 4; ++q) {
                const Quarter qq{y, q};
                const long t = static_cast<long>(qq.ordinal());
                report.check(tag + " sur " + format_quarter(qq), chars::compute_sur(f.lib, qq),
                             oracle::standardized(f.ref.rev, t, 8, 4, true));
                report.check(tag + " sue " + format_quarter(qq), chars::compute_sue(f.lib, qq),
                             oracle::standardized(f.ref.earnings, t, 8, 4, false));
            }
        }
    }
}

// Profitability shocks of every firm-quarter in `panels` random cross-sections.
inline void check_profit_shocks(std::uint64_t seed, int panels, int firms, Report& report) {
    std::mt19937_64 gen(seed);
    for (int pnl = 0; pnl < panels; ++pnl) {
        const bool all_pay = pnl % 4 == 3;
        if (all_pay) ++report.degenerate_cases;
        chars::FinancialHistory history;
        std::vector<Firm> fs;
        for (int i = 0; i < firms; ++i) {
            const auto kind = all_pay ? Degenerate::AllPayDividends
                                      : (i % 7 == 6 ? Degenerate::MissingHistory : Degenerate::None);
            fs.push_back(make_firm(gen, kind));
            history.emplace("F" + std::to_string(i), fs.back().lib);
        }
        for (bool with_vol : {false, true}) {
            const auto model = with_vol ? chars::ProfitModel::Vol : chars::ProfitModel::Hvz;
            const auto fits = chars::fit_all_quarters(history, model);
            // Oracle fit per quarter q: ROA_{q+1} on regressors at q.
            std::map<long, Eigen::VectorXd> ref_fits;
            std::map<long, std::vector<int>> kept_cols;
            const long q0 = static_cast<long>(Quarter{kFirstYear, 1}.ordinal());
            const long q1 = static_cast<long>(Quarter{kFirstYear + kYears - 1, 4}.ordinal());
            for (long q = q0; q < q1; ++q) {
                std::vector<oracle::ProfitRow> rows;
                std::vector<double> next;
                for (const auto& f : fs) {
                    auto x = f.profit.find(q);
                    auto r = f.roa.find(q + 1);
                    if (x == f.profit.end() || r == f.roa.end()) continue;
                    if (with_vol && !x->second.vol) continue;
                    rows.push_back(x->second);
                    next.push_back(r->second);
                }
                const std::size_t params = with_vol ? 6 : 5;
                if (rows.size() < params + 5) continue;
                bool dd_constant = true;
                for (const auto& r : rows) dd_constant = dd_constant && r.dd == rows.front().dd;
                if (dd_constant) {
                    // Refit without the indicator and expand with a zero.
                    for (auto& r : rows) r.dd = 0.0;
                    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(params - 1));
                    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
                    for (std::size_t i = 0; i < rows.size(); ++i) {
                        const auto ii = static_cast<Eigen::Index>(i);
                        x(ii, 0) = 1.0;
                        x(ii, 1) = rows[i].va;
                        x(ii, 2) = rows[i].db;
                        x(ii, 3) = rows[i].prof;
                        if (with_vol) x(ii, 4) = *rows[i].vol;
                        y(ii) = next[i];
                    }
                    const Eigen::VectorXd b = x.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
                    Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params));
                    full(0) = b(0);
                    full(1) = b(1);
                    full(3) = b(2);
                    full(4) = b(3);
                    if (with_vol) full(5) = b(4);
                    ref_fits[q] = full;
                } else {
                    ref_fits[q] = oracle::profit_fit(rows, next, with_vol);
                }
            }
            for (std::size_t i = 0; i < fs.size(); ++i) {
                const auto& f = fs[i];
                for (long target = q0; target <= q1; ++target) {
                    std::optional<double> ref;
                    auto fit = ref_fits.find(target - 2);
                    auto x = f.profit.find(target - 1);
                    auto realized = f.roa.find(target);
                    if (fit != ref_fits.end() && x != f.profit.end() && realized != f.roa.end() &&
                        (!with_vol || x->second.vol)) {
                        ref = realized->second - oracle::profit_predict(fit->second, x->second);
                    }
                    const auto lib = chars::profitability_shock(history.at("F" + std::to_string(i)),
                                                                Quarter::from_ordinal(target), model, fits);
                    report.check("panel " + std::to_string(pnl) + " firm " + std::to_string(i) + " shock " +
                                     format_quarter(Quarter::from_ordinal(target)),
                                 lib, ref);
                }
            }
        }
    }
}

}  // namespace fundamentals
