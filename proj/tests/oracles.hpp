#pragma once

// Reference implementations used only by the tests. Each is written
// directly from the defining formula and shares no code with the library
// routine it checks.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// ------------------------------------------------------------ sentiment

// Code points are compared after ASCII lower-casing; the test alphabets only
// contain ASCII letters as cased characters.
inline char32_t lower(char32_t c) { return (c >= U'A' && c <= U'Z') ? c + 32 : c; }

inline std::u32string lower(const std::u32string& s) {
    std::u32string out = s;
    for (auto& c : out) c = lower(c);
    return out;
}

struct Counts {
    unsigned nw = 0;
    unsigned pw = 0;
};

// At each position try every possible length from longest to shortest;
// count the first hit and jump past it, else advance one character.
inline Counts greedy_scan(const std::u32string& text, const std::vector<std::u32string>& positive,
                          const std::vector<std::u32string>& negative) {
    std::set<std::u32string> pos, neg;
    std::size_t longest = 0;
    for (const auto& t : positive) {
        pos.insert(lower(t));
        longest = std::max(longest, t.size());
    }
    for (const auto& t : negative) {
        neg.insert(lower(t));
        longest = std::max(longest, t.size());
    }
    const std::u32string s = lower(text);
    Counts c;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t hit = 0;
        for (std::size_t len = std::min(longest, s.size() - i); len >= 1; --len) {
            const auto sub = s.substr(i, len);
            if (pos.count(sub)) {
                ++c.pw;
                hit = len;
                break;
            }
            if (neg.count(sub)) {
                ++c.nw;
                hit = len;
                break;
            }
        }
        i += hit ? hit : 1;
    }
    return c;
}

inline std::string to_utf8(const std::u32string& s) {
    std::string out;
    for (char32_t c : s) {
        if (c < 0x80) {
            out += static_cast<char>(c);
        } else if (c < 0x800) {
            out += static_cast<char>(0xC0 | (c >> 6));
            out += static_cast<char>(0x80 | (c & 0x3F));
        } else if (c < 0x10000) {
            out += static_cast<char>(0xE0 | (c >> 12));
            out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (c & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (c >> 18));
            out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (c & 0x3F));
        }
    }
    return out;
}

// ---------------------------------------------------- dummy-variable OLS

// Slopes from OLS of y on [X, one indicator per firm, one indicator per
// time group except the first], solved by SVD.
inline Eigen::VectorXd dummy_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 const std::vector<std::size_t>& firm, const std::vector<long>& time_group,
                                 bool time_effects) {
    std::map<std::size_t, int> firm_col;
    for (auto f : firm) firm_col.emplace(f, 0);
    int k = 0;
    for (auto& [f, c] : firm_col) c = k++;
    std::map<long, int> time_col;
    if (time_effects) {
        for (auto t : time_group) time_col.emplace(t, 0);
        int j = -1;
        for (auto& [t, c] : time_col) c = j++;  // first group is the reference
    }
    const int n_time = time_effects ? static_cast<int>(time_col.size()) - 1 : 0;
    const auto n = x.rows();
    const auto p = x.cols();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, p + k + n_time);
    d.leftCols(p) = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i, p + firm_col[firm[static_cast<std::size_t>(i)]]) = 1.0;
        if (time_effects) {
            const int c = time_col[time_group[static_cast<std::size_t>(i)]];
            if (c >= 0) d(i, p + k + c) = 1.0;
        }
    }
    const Eigen::VectorXd b = d.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
    return b.head(p);
}

// ------------------------------------------------------- fundamentals

// Two-pass sample standard deviation.
inline std::optional<double> two_pass_sd(const std::vector<double>& v) {
    if (v.size() < 2) return std::nullopt;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

struct Quarterly {
    // quarter ordinal -> value; absent quarters are missing
    std::map<long, double> rev, earnings, ni, cfo, acc, ta;
};

inline std::optional<double> get(const std::map<long, double>& m, long k) {
    auto it = m.find(k);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

// Annual value: sum of the four quarters of `year`.
inline std::optional<double> annual_sum(const std::map<long, double>& m, int year) {
    double s = 0.0;
    for (int q = 0; q < 4; ++q) {
        auto v = get(m, static_cast<long>(year) * 4 + q);
        if (!v) return std::nullopt;
        s += *v;
    }
    return s;
}

inline std::optional<double> year_end_assets(const Quarterly& d, int year) {
    return get(d.ta, static_cast<long>(year) * 4 + 3);
}

// ACC_y / TA_{y-1}.
inline std::optional<double> ea(const Quarterly& d, int year) {
    auto acc = annual_sum(d.acc, year);
    auto ta = year_end_assets(d, year - 1);
    if (!acc || !ta || *ta <= 0.0) return std::nullopt;
    return *acc / *ta;
}

// Std(CFO_{y-k}/A_{y-k-1}) / Std(NI_{y-k}/A_{y-k-1}), k = 0..3.
inline std::optional<double> es(const Quarterly& d, int year) {
    std::vector<double> c, n;
    for (int k = 0; k <= 3; ++k) {
        auto cfo = annual_sum(d.cfo, year - k);
        auto ni = annual_sum(d.ni, year - k);
        auto a = year_end_assets(d, year - k - 1);
        if (!cfo || !ni || !a || *a == 0.0) return std::nullopt;
        c.push_back(*cfo / *a);
        n.push_back(*ni / *a);
    }
    auto sc = two_pass_sd(c);
    auto sn = two_pass_sd(n);
    if (!sc || !sn || *sn == 0.0) return std::nullopt;
    return *sc / *sn;
}

// (X_q - X_{q-4}) / sd over the trailing window of either year-over-year
// changes (SUR) or levels (SUE).
inline std::optional<double> standardized(const std::map<long, double>& x, long q, int window, int min_obs,
                                          bool changes) {
    auto now = get(x, q);
    auto ago = get(x, q - 4);
    if (!now || !ago) return std::nullopt;
    std::vector<double> h;
    for (long k = q - window; k < q; ++k) {
        auto v = get(x, k);
        if (!v) continue;
        if (changes) {
            auto b = get(x, k - 4);
            if (!b) continue;
            h.push_back(*v - *b);
        } else {
            h.push_back(*v);
        }
    }
    if (static_cast<int>(h.size()) < std::max(min_obs, 2)) return std::nullopt;
    auto sd = two_pass_sd(h);
    if (!sd || *sd == 0.0) return std::nullopt;
    return (*now - *ago) / *sd;
}

// Profitability regressors of one firm-quarter.
struct ProfitRow {
    double va, dd, db, prof;
    std::optional<double> vol;
};

// SVD least-squares fit of next-quarter ROA on [1, va, dd, db, prof(, vol)].
inline Eigen::VectorXd profit_fit(const std::vector<ProfitRow>& rows, const std::vector<double>& next, bool with_vol) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index p = with_vol ? 6 : 5;
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        x(i, 0) = 1.0;
        x(i, 1) = r.va;
        x(i, 2) = r.dd;
        x(i, 3) = r.db;
        x(i, 4) = r.prof;
        if (with_vol) x(i, 5) = *r.vol;
        y(i) = next[static_cast<std::size_t>(i)];
    }
    return x.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
}

inline double profit_predict(const Eigen::VectorXd& a, const ProfitRow& r) {
    double v = a(0) + a(1) * r.va + a(2) * r.dd + a(3) * r.db + a(4) * r.prof;
    if (a.size() == 6) v += a(5) * *r.vol;
    return v;
}

}  // namespace oracle
