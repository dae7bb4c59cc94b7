#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "revpanel/econometrics.hpp"
#include "revpanel/error.hpp"
#include "revpanel/least_squares.hpp"

namespace revpanel::econ {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Equation {
    std::size_t firm = 0;
    std::int64_t time = 0;
    double dy = 0.0;
    std::vector<double> dx;  // lagged-outcome differences, then exogenous differences
    std::vector<std::pair<std::pair<std::int64_t, int>, double>> gmm_inst;
    double level_y = 0.0;
    std::vector<double> level_x;
};

// Residual sum of squares of y on the columns of x (minimum-norm fit).
std::pair<double, Eigen::Index> rss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.cols() == 0) return {y.squaredNorm(), 0};
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
    cod.setThreshold(1e-10);
    return {(y - x * cod.solve(y)).squaredNorm(), cod.rank()};
}

// H_i Z_i for the first-difference error structure: 2 on the diagonal, -1
// between equations one period apart.
Eigen::MatrixXd h_times(const std::vector<std::int64_t>& times, const Eigen::MatrixXd& z) {
    Eigen::MatrixXd out = 2.0 * z;
    for (std::size_t a = 0; a + 1 < times.size(); ++a) {
        if (times[a + 1] == times[a] + 1) {
            const auto i = static_cast<Eigen::Index>(a);
            out.row(i) -= z.row(i + 1);
            out.row(i + 1) -= z.row(i);
        }
    }
    return out;
}

}  // namespace

std::optional<double> ar_test(const GmmMoments& m, int order) {
    if (order < 1) throw Error("AR test order must be positive");
    const Eigen::Index k = m.a_inv.rows();
    const Eigen::Index l = m.xzw.cols();
    double d0 = 0.0;
    double outer = 0.0;
    Eigen::RowVectorXd wx = Eigen::RowVectorXd::Zero(k);
    Eigen::VectorXd zuuw = Eigen::VectorXd::Zero(l);
    std::size_t pairs = 0;
    for (const auto& f : m.firms) {
        const auto n = static_cast<Eigen::Index>(f.times.size());
        Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
        for (Eigen::Index a = 0; a < n; ++a) {
            const std::int64_t target = f.times[static_cast<std::size_t>(a)] - order;
            auto it = std::lower_bound(f.times.begin(), f.times.end(), target);
            if (it != f.times.end() && *it == target) {
                w(a) = f.resid(it - f.times.begin());
                ++pairs;
            }
        }
        const double wu = w.dot(f.resid);
        d0 += wu;
        outer += wu * wu;
        wx += w.transpose() * f.x;
        zuuw += f.z.transpose() * f.resid * wu;
    }
    if (pairs == 0) return std::nullopt;
    const double v = outer - 2.0 * (wx * m.a_inv * m.xzw * zuuw)(0) + (wx * m.cov * wx.transpose())(0);
    if (!(v > 0.0)) return std::nullopt;
    return d0 / std::sqrt(v);
}

FitResult diff_gmm(const PanelDataset& p, const RegressionSpec& spec, GmmMoments* moments_out) {
    if (spec.lag_depth < 1) throw Error("dynamic model needs at least one lag of the outcome");
    if (spec.gmm.min_lag < 2 || spec.gmm.max_lag < spec.gmm.min_lag) {
        throw Error(fmt::format("invalid instrument lag range {}..{}", spec.gmm.min_lag, spec.gmm.max_lag));
    }
    FitResult fit;
    fit.estimator = "gmm";
    fit.spec = spec;
    const int lags = spec.lag_depth;

    std::vector<std::string> term_names;
    for (int l = 1; l <= lags; ++l) term_names.push_back(fmt::format("L{}.{}", l, spec.outcome));
    std::vector<std::vector<double>> exog;
    if (!spec.regressor.empty()) {
        term_names.push_back(spec.regressor);
        exog.push_back(p.column(spec.regressor));
    }
    for (const auto& c : spec.controls) {
        if (c == spec.regressor) continue;
        if (spec.lagged_controls) {
            term_names.push_back("L1." + c);
            exog.push_back(lag_column(p, p.column(c), 1));
        } else {
            term_names.push_back(c);
            exog.push_back(p.column(c));
        }
    }
    const std::vector<double>& y = p.column(spec.outcome);
    const std::size_t kx = exog.size();
    const std::size_t k_main = static_cast<std::size_t>(lags) + kx;

    // Build the differenced equations firm by firm.
    std::vector<Equation> eqs;
    std::size_t begin = 0;
    while (begin < p.rows()) {
        std::size_t end = begin;
        while (end < p.rows() && p.firm[end] == p.firm[begin]) ++end;
        auto row_at = [&](std::int64_t t) -> std::optional<std::size_t> {
            auto first = p.time.begin() + static_cast<std::ptrdiff_t>(begin);
            auto last = p.time.begin() + static_cast<std::ptrdiff_t>(end);
            auto it = std::lower_bound(first, last, t);
            if (it == last || *it != t) return std::nullopt;
            return static_cast<std::size_t>(it - p.time.begin());
        };
        auto y_at = [&](std::int64_t t) {
            auto r = row_at(t);
            return r ? y[*r] : kNaN;
        };
        for (std::size_t r = begin; r < end; ++r) {
            const std::int64_t t = p.time[r];
            std::vector<double> ylev(static_cast<std::size_t>(lags) + 2);
            bool ok = true;
            for (int l = 0; l <= lags + 1 && ok; ++l) {
                ylev[static_cast<std::size_t>(l)] = y_at(t - l);
                ok = std::isfinite(ylev[static_cast<std::size_t>(l)]);
            }
            if (!ok) continue;
            auto prev = row_at(t - 1);
            std::vector<double> xnow(kx), xprev(kx);
            for (std::size_t j = 0; j < kx && ok; ++j) {
                xnow[j] = exog[j][r];
                xprev[j] = exog[j][*prev];
                ok = std::isfinite(xnow[j]) && std::isfinite(xprev[j]);
            }
            if (!ok) continue;
            Equation e;
            e.firm = p.firm[r];
            e.time = t;
            e.dy = ylev[0] - ylev[1];
            for (int l = 1; l <= lags; ++l) {
                e.dx.push_back(ylev[static_cast<std::size_t>(l)] - ylev[static_cast<std::size_t>(l + 1)]);
            }
            for (std::size_t j = 0; j < kx; ++j) e.dx.push_back(xnow[j] - xprev[j]);
            for (int j = spec.gmm.min_lag; j <= spec.gmm.max_lag; ++j) {
                const double v = y_at(t - j);
                if (std::isfinite(v)) {
                    e.gmm_inst.push_back({{spec.gmm.collapse ? 0 : t, j}, v});
                }
            }
            e.level_y = ylev[0];
            for (int l = 1; l <= lags; ++l) e.level_x.push_back(ylev[static_cast<std::size_t>(l)]);
            for (std::size_t j = 0; j < kx; ++j) e.level_x.push_back(xnow[j]);
            eqs.push_back(std::move(e));
        }
        begin = end;
    }
    if (eqs.empty()) throw InsufficientDataError("no usable differenced equations");

    // Instrument columns in key order.
    std::map<std::pair<std::int64_t, int>, Eigen::Index> gmm_cols;
    for (const auto& e : eqs) {
        for (const auto& [key, v] : e.gmm_inst) {
            if (v != 0.0) gmm_cols.emplace(key, 0);
        }
    }
    Eigen::Index next = 0;
    for (auto& [key, idx] : gmm_cols) idx = next++;
    const auto n_gmm = static_cast<Eigen::Index>(gmm_cols.size());

    // Differenced period dummies, first period as reference.
    std::vector<std::int64_t> periods;
    if (spec.gmm.time_dummies) {
        for (const auto& e : eqs) periods.push_back(e.time);
        std::sort(periods.begin(), periods.end());
        periods.erase(std::unique(periods.begin(), periods.end()), periods.end());
        if (!periods.empty()) periods.erase(periods.begin());
    }

    const auto n = static_cast<Eigen::Index>(eqs.size());
    Eigen::MatrixXd dummies = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(periods.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::int64_t t = eqs[static_cast<std::size_t>(i)].time;
        auto set = [&](std::int64_t s, double v) {
            auto it = std::lower_bound(periods.begin(), periods.end(), s);
            if (it != periods.end() && *it == s) dummies(i, it - periods.begin()) += v;
        };
        set(t, 1.0);
        set(t - 1, -1.0);
    }
    std::vector<Eigen::Index> keep_dummies;
    if (dummies.cols() > 0) {
        auto dep = linalg::dependent_columns(dummies);
        for (Eigen::Index j = 0; j < dummies.cols(); ++j) {
            if (dummies.col(j).cwiseAbs().maxCoeff() > 0.0 &&
                std::find(dep.begin(), dep.end(), static_cast<std::size_t>(j)) == dep.end()) {
                keep_dummies.push_back(j);
            }
        }
    }
    const auto n_dum = static_cast<Eigen::Index>(keep_dummies.size());
    const auto k = static_cast<Eigen::Index>(k_main) + n_dum;
    const auto l = n_gmm + static_cast<Eigen::Index>(kx) + n_dum;

    Eigen::MatrixXd x(n, k);
    Eigen::VectorXd dy(n);
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, l);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& e = eqs[static_cast<std::size_t>(i)];
        dy(i) = e.dy;
        for (std::size_t j = 0; j < k_main; ++j) x(i, static_cast<Eigen::Index>(j)) = e.dx[j];
        for (Eigen::Index j = 0; j < n_dum; ++j) x(i, static_cast<Eigen::Index>(k_main) + j) = dummies(i, keep_dummies[static_cast<std::size_t>(j)]);
        for (const auto& [key, v] : e.gmm_inst) {
            auto it = gmm_cols.find(key);
            if (it != gmm_cols.end()) z(i, it->second) = v;
        }
        for (std::size_t j = 0; j < kx; ++j) z(i, n_gmm + static_cast<Eigen::Index>(j)) = e.dx[static_cast<std::size_t>(lags) + j];
        for (Eigen::Index j = 0; j < n_dum; ++j) z(i, n_gmm + static_cast<Eigen::Index>(kx) + j) = x(i, static_cast<Eigen::Index>(k_main) + j);
    }

    // Firm blocks.
    GmmMoments m;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> spans;
    {
        Eigen::Index b = 0;
        while (b < n) {
            Eigen::Index e = b;
            while (e < n && eqs[static_cast<std::size_t>(e)].firm == eqs[static_cast<std::size_t>(b)].firm) ++e;
            spans.emplace_back(b, e - b);
            b = e;
        }
    }
    const std::size_t n_firms = spans.size();
    if (n <= k) throw InsufficientDataError(fmt::format("{} differenced equations for {} parameters", n, k));

    Eigen::MatrixXd zhz = Eigen::MatrixXd::Zero(l, l);
    for (const auto& [b, len] : spans) {
        std::vector<std::int64_t> times;
        for (Eigen::Index i = b; i < b + len; ++i) times.push_back(eqs[static_cast<std::size_t>(i)].time);
        const Eigen::MatrixXd zi = z.middleRows(b, len);
        zhz.noalias() += zi.transpose() * h_times(times, zi);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(zhz);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cut = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    Eigen::VectorXd inv(ev.size()), inv_sqrt(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        inv(i) = ev(i) > cut ? 1.0 / ev(i) : 0.0;
        inv_sqrt(i) = ev(i) > cut ? 1.0 / std::sqrt(ev(i)) : 0.0;
    }
    const Eigen::MatrixXd w = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    const Eigen::MatrixXd w_sqrt = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();

    const Eigen::MatrixXd zx = z.transpose() * x;
    const Eigen::VectorXd zy = z.transpose() * dy;
    {
        std::vector<std::string> all_names = term_names;
        for (Eigen::Index j = 0; j < n_dum; ++j) {
            all_names.push_back(fmt::format("time:{}", periods[static_cast<std::size_t>(keep_dummies[static_cast<std::size_t>(j)])]));
        }
        auto dep = linalg::dependent_columns(w_sqrt * zx);
        if (!dep.empty()) {
            std::vector<std::string> cols;
            for (auto j : dep) cols.push_back(all_names[j]);
            throw RankDeficientError(
                fmt::format("instrumented design is rank deficient; columns: {}", fmt::join(cols, ", ")), cols);
        }
    }
    const Eigen::MatrixXd xzw = zx.transpose() * w;
    const Eigen::MatrixXd a = xzw * zx;
    const Eigen::MatrixXd a_inv = a.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::VectorXd beta = a_inv * (xzw * zy);
    const Eigen::VectorXd resid = dy - x * beta;

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(l, l);
    for (const auto& [b, len] : spans) {
        Eigen::VectorXd g = z.middleRows(b, len).transpose() * resid.segment(b, len);
        s.noalias() += g * g.transpose();
    }
    const Eigen::MatrixXd cov = a_inv * xzw * s * xzw.transpose() * a_inv;

    m.a_inv = a_inv;
    m.xzw = xzw;
    m.cov = cov;
    for (const auto& [b, len] : spans) {
        GmmFirmBlock blk;
        for (Eigen::Index i = b; i < b + len; ++i) blk.times.push_back(eqs[static_cast<std::size_t>(i)].time);
        blk.x = x.middleRows(b, len);
        blk.z = z.middleRows(b, len);
        blk.resid = resid.segment(b, len);
        m.firms.push_back(std::move(blk));
    }

    // Level constant: mean of y - x'b over the estimation sample, with a
    // firm-clustered standard error of that mean.
    Eigen::VectorXd level_e(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& e = eqs[static_cast<std::size_t>(i)];
        double v = e.level_y;
        for (std::size_t j = 0; j < k_main; ++j) v -= beta(static_cast<Eigen::Index>(j)) * e.level_x[j];
        level_e(i) = v;
    }
    const double constant = level_e.mean();
    double cluster_ss = 0.0;
    for (const auto& [b, len] : spans) {
        const double sum = (level_e.segment(b, len).array() - constant).sum();
        cluster_ss += sum * sum;
    }
    const double g = static_cast<double>(n_firms);
    const double const_var = n_firms > 1 ? g / (g - 1.0) * cluster_ss / (static_cast<double>(n) * static_cast<double>(n)) : kNaN;

    const auto n_terms = static_cast<Eigen::Index>(k_main) + 1;
    fit.cov = Eigen::MatrixXd::Zero(n_terms, n_terms);
    fit.cov.topLeftCorner(static_cast<Eigen::Index>(k_main), static_cast<Eigen::Index>(k_main)) =
        cov.topLeftCorner(static_cast<Eigen::Index>(k_main), static_cast<Eigen::Index>(k_main));
    fit.cov(n_terms - 1, n_terms - 1) = const_var;
    for (std::size_t j = 0; j < k_main; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        Term t{term_names[j], beta(jj), std::sqrt(std::max(cov(jj, jj), 0.0)), 0.0};
        t.t = t.se > 0.0 ? t.coef / t.se : kNaN;
        fit.terms.push_back(t);
    }
    {
        Term t{"const", constant, std::sqrt(const_var), 0.0};
        t.t = t.se > 0.0 ? t.coef / t.se : kNaN;
        fit.terms.push_back(t);
    }
    for (std::size_t j = 0; j < k_main; ++j) {
        std::vector<double> v;
        v.reserve(eqs.size());
        for (const auto& e : eqs) v.push_back(e.level_x[j]);
        fit.regressor_sd.emplace_back(term_names[j], linalg::sample_sd(v).value_or(kNaN));
    }

    fit.n_obs = eqs.size();
    fit.n_firms = n_firms;
    fit.n_instruments = static_cast<std::size_t>(l);
    if (fit.n_instruments > n_firms) {
        fit.warnings.push_back(fmt::format("instrument count {} exceeds firm count {}", l, n_firms));
    }

    // First-stage relevance of the excluded instruments for the first
    // lagged outcome difference.
    {
        const Eigen::VectorXd target = x.col(0);
        auto [rss_u, rank_u] = rss(z, target);
        auto [rss_r, rank_r] = rss(z.rightCols(l - n_gmm), target);
        const Eigen::Index q = rank_u - rank_r;
        const Eigen::Index dof = n - rank_u;
        if (q > 0 && dof > 0) {
            const double f = rss_u > 0.0 ? ((rss_r - rss_u) / static_cast<double>(q)) / (rss_u / static_cast<double>(dof))
                                         : std::numeric_limits<double>::infinity();
            fit.first_stage_f = f;
            if (f < spec.gmm.weak_instrument_f) {
                fit.warnings.push_back(fmt::format("weak instruments: first-stage F {:.3g} below {:g}", f,
                                                   spec.gmm.weak_instrument_f));
            }
        }
    }

    fit.ar1_z = ar_test(m, 1);
    fit.ar2_z = ar_test(m, 2);
    if (fit.ar1_z) fit.ar1_p = linalg::two_sided_p(*fit.ar1_z);
    if (fit.ar2_z) fit.ar2_p = linalg::two_sided_p(*fit.ar2_z);
    if (moments_out) *moments_out = std::move(m);
    return fit;
}

}  // namespace revpanel::econ
