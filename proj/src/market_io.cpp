#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "revpanel/characteristics.hpp"
#include "revpanel/csv.hpp"
#include "revpanel/error.hpp"

namespace revpanel::chars {

namespace {

struct Table {
    std::string name;
    std::ifstream in;
    csv::Reader reader;
    csv::Header header;

    explicit Table(const std::filesystem::path& path)
        : name(path.string()), in(path, std::ios::binary), reader(in) {
        if (!in) throw Error(fmt::format("input file not found: {}", name));
        std::vector<std::string> f;
        if (!reader.next(f)) throw Error(fmt::format("{}: empty file", name));
        header = csv::Header(f);
    }

    bool next(std::vector<std::string>& f) {
        while (reader.next(f)) {
            if (f.size() == 1 && f[0].empty()) continue;
            if (f.size() != header.size()) fail("wrong field count");
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(std::string_view what) const {
        throw Error(fmt::format("{}:{}: {}", name, reader.record_line(), what));
    }

    double number(const std::string& s, std::string_view column) const {
        std::optional<double> v;
        try {
            v = csv::parse_optional_double(s);
        } catch (const std::exception&) {
            fail(fmt::format("bad number in column '{}'", column));
        }
        if (!v) fail(fmt::format("missing value in column '{}'", column));
        return *v;
    }

    std::optional<double> optional_number(const std::string& s, std::string_view column) const {
        try {
            return csv::parse_optional_double(s);
        } catch (const std::exception&) {
            fail(fmt::format("bad number in column '{}'", column));
        }
    }

    Date date(const std::string& s) const {
        auto d = parse_date(s);
        if (!d) fail(fmt::format("bad date '{}'", s));
        return *d;
    }
};

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    return out;
}

using Member = std::optional<double> QuarterlyFinancials::*;

const std::vector<std::pair<std::string, Member>>& financial_columns() {
    static const std::vector<std::pair<std::string, Member>> cols = {
        {"total_assets", &QuarterlyFinancials::total_assets},
        {"net_profit", &QuarterlyFinancials::net_profit},
        {"operating_profit", &QuarterlyFinancials::operating_profit},
        {"revenue_per_share", &QuarterlyFinancials::revenue_per_share},
        {"cfo", &QuarterlyFinancials::cfo},
        {"accruals", &QuarterlyFinancials::accruals},
        {"book_equity", &QuarterlyFinancials::book_equity},
        {"sales_expense", &QuarterlyFinancials::sales_expense},
        {"operating_revenue", &QuarterlyFinancials::operating_revenue},
        {"rd_expense", &QuarterlyFinancials::rd_expense},
        {"dividends", &QuarterlyFinancials::dividends},
        {"book_value", &QuarterlyFinancials::book_value},
        {"market_value", &QuarterlyFinancials::market_value},
        {"pre_extraordinary_income", &QuarterlyFinancials::pre_extraordinary_income},
    };
    return cols;
}

}  // namespace

MarketSeries read_market_csv(const std::filesystem::path& path) {
    Table t(path);
    const auto c_date = t.header.require("date", t.name);
    const auto c_firm = t.header.require("firm_id", t.name);
    const auto c_ret = t.header.require("return", t.name);
    const auto c_vol = t.header.require("volume", t.name);
    const auto c_cap = t.header.require("tradable_cap", t.name);
    const auto c_turn = t.header.require("turnover", t.name);
    MarketSeries out;
    std::vector<std::string> f;
    while (t.next(f)) {
        DailyBar b;
        b.date = t.date(f[c_date]);
        b.ret = t.number(f[c_ret], "return");
        b.volume = t.number(f[c_vol], "volume");
        b.tradable_cap = t.number(f[c_cap], "tradable_cap");
        b.turnover = t.number(f[c_turn], "turnover");
        if (b.volume < 0.0) t.fail("negative volume");
        if (!(b.tradable_cap > 0.0)) t.fail("non-positive tradable_cap");
        out[f[c_firm]].push_back(b);
    }
    for (auto& [firm, bars] : out) {
        std::stable_sort(bars.begin(), bars.end(),
                         [](const DailyBar& a, const DailyBar& b) { return a.date < b.date; });
        for (std::size_t i = 1; i < bars.size(); ++i) {
            if (bars[i].date == bars[i - 1].date) {
                throw Error(fmt::format("{}: firm {} has two rows for {}", t.name, firm,
                                        format_date(bars[i].date)));
            }
        }
    }
    return out;
}

FactorSeries read_factors_csv(const std::filesystem::path& path) {
    Table t(path);
    const auto c_date = t.header.require("date", t.name);
    const auto c_mkt = t.header.require("mkt", t.name);
    const auto c_smb = t.header.require("smb", t.name);
    const auto c_hml = t.header.require("hml", t.name);
    const auto c_umd = t.header.find("umd");
    FactorSeries out;
    std::vector<std::string> f;
    while (t.next(f)) {
        FactorDay d;
        d.date = t.date(f[c_date]);
        d.mkt = t.number(f[c_mkt], "mkt");
        d.smb = t.number(f[c_smb], "smb");
        d.hml = t.number(f[c_hml], "hml");
        if (c_umd) d.umd = t.optional_number(f[*c_umd], "umd").value_or(0.0);
        out.push_back(d);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const FactorDay& a, const FactorDay& b) { return a.date < b.date; });
    return out;
}

FinancialHistory read_financials_csv(const std::filesystem::path& path) {
    Table t(path);
    const auto c_firm = t.header.require("firm_id", t.name);
    const auto c_quarter = t.header.require("quarter", t.name);
    const auto c_pays = t.header.find("pays_dividend");
    std::vector<std::pair<std::optional<std::size_t>, Member>> cols;
    for (const auto& [name, member] : financial_columns()) cols.emplace_back(t.header.find(name), member);
    FinancialHistory out;
    std::vector<std::string> f;
    while (t.next(f)) {
        auto q = parse_quarter(f[c_quarter]);
        if (!q) t.fail(fmt::format("bad quarter '{}'", f[c_quarter]));
        QuarterlyFinancials row;
        row.quarter = *q;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].first) {
                row.*(cols[j].second) = t.optional_number(f[*cols[j].first], financial_columns()[j].first);
            }
        }
        if (c_pays) {
            const auto& s = f[*c_pays];
            if (s == "1" || s == "true") row.pays_dividend = true;
            else if (s == "0" || s == "false") row.pays_dividend = false;
            else if (!s.empty()) t.fail(fmt::format("bad pays_dividend '{}'", s));
        }
        if (row.total_assets && !(*row.total_assets > 0.0)) t.fail("non-positive total_assets");
        auto [it, fresh] = out[f[c_firm]].emplace(q->ordinal(), row);
        if (!fresh) t.fail(fmt::format("duplicate quarter {} for firm {}", format_quarter(*q), f[c_firm]));
    }
    return out;
}

std::vector<CcisObservation> read_ccis_csv(const std::filesystem::path& path) {
    Table t(path);
    const auto c_month = t.header.require("month", t.name);
    const auto c_value = t.header.require("ccis", t.name);
    std::vector<CcisObservation> out;
    std::vector<std::string> f;
    while (t.next(f)) {
        auto m = parse_month(f[c_month]);
        if (!m) t.fail(fmt::format("bad month '{}'", f[c_month]));
        out.push_back({*m, t.number(f[c_value], "ccis")});
    }
    std::sort(out.begin(), out.end(),
              [](const CcisObservation& a, const CcisObservation& b) { return a.month < b.month; });
    return out;
}

void write_market_csv(const std::filesystem::path& path, const MarketSeries& market) {
    auto out = open_out(path);
    csv::write_row(out, {"date", "firm_id", "return", "volume", "tradable_cap", "turnover"});
    for (const auto& [firm, bars] : market) {
        for (const auto& b : bars) {
            csv::write_row(out, {format_date(b.date), firm, csv::format_number(b.ret),
                                 csv::format_number(b.volume), csv::format_number(b.tradable_cap),
                                 csv::format_number(b.turnover)});
        }
    }
}

void write_factors_csv(const std::filesystem::path& path, const FactorSeries& factors) {
    auto out = open_out(path);
    csv::write_row(out, {"date", "mkt", "smb", "hml", "umd"});
    for (const auto& d : factors) {
        csv::write_row(out, {format_date(d.date), csv::format_number(d.mkt), csv::format_number(d.smb),
                             csv::format_number(d.hml), csv::format_number(d.umd)});
    }
}

void write_financials_csv(const std::filesystem::path& path, const FinancialHistory& financials) {
    auto out = open_out(path);
    std::vector<std::string> header = {"firm_id", "quarter"};
    for (const auto& [name, member] : financial_columns()) header.push_back(name);
    header.push_back("pays_dividend");
    csv::write_row(out, header);
    for (const auto& [firm, quarters] : financials) {
        for (const auto& [ord, q] : quarters) {
            std::vector<std::string> f = {firm, format_quarter(q.quarter)};
            for (const auto& [name, member] : financial_columns()) f.push_back(csv::format_optional(q.*member));
            f.push_back(q.pays_dividend ? (*q.pays_dividend ? "1" : "0") : "");
            csv::write_row(out, f);
        }
    }
}

void write_ccis_csv(const std::filesystem::path& path, const std::vector<CcisObservation>& ccis) {
    auto out = open_out(path);
    csv::write_row(out, {"month", "ccis"});
    for (const auto& c : ccis) csv::write_row(out, {format_month(c.month), csv::format_number(c.value)});
}

}  // namespace revpanel::chars
