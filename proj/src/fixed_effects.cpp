#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "revpanel/econometrics.hpp"
#include "revpanel/error.hpp"
#include "revpanel/least_squares.hpp"

namespace revpanel::econ {

std::optional<TimeEffects> parse_time_effects(std::string_view s) {
    if (s == "none") return TimeEffects::None;
    if (s == "year") return TimeEffects::Year;
    if (s == "week") return TimeEffects::Week;
    return std::nullopt;
}

std::optional<SePolicy> parse_se_policy(std::string_view s) {
    if (s == "classical") return SePolicy::Classical;
    if (s == "clustered") return SePolicy::ClusteredFirm;
    if (s == "robust") return SePolicy::Robust;
    return std::nullopt;
}

std::string_view to_string(TimeEffects t) {
    switch (t) {
        case TimeEffects::None: return "none";
        case TimeEffects::Year: return "year";
        case TimeEffects::Week: return "week";
    }
    return "none";
}

std::string_view to_string(SePolicy s) {
    switch (s) {
        case SePolicy::Classical: return "classical";
        case SePolicy::ClusteredFirm: return "clustered";
        case SePolicy::Robust: return "robust";
    }
    return "clustered";
}

const Term* FitResult::find(std::string_view name) const {
    for (const auto& t : terms) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

std::optional<double> FitResult::sd_of(std::string_view name) const {
    for (const auto& [n, sd] : regressor_sd) {
        if (n == name) return sd;
    }
    return std::nullopt;
}

std::vector<std::string> static_regressors(const RegressionSpec& spec) {
    std::vector<std::string> out;
    if (!spec.regressor.empty()) out.push_back(spec.regressor);
    for (const auto& c : spec.controls) {
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    return out;
}

Eigen::MatrixXd clustered_covariance(const Eigen::MatrixXd& x, const Eigen::VectorXd& resid,
                                     const Eigen::MatrixXd& xtx_inv,
                                     std::span<const std::size_t> cluster) {
    const auto n = x.rows();
    const auto k = x.cols();
    if (static_cast<std::size_t>(n) != cluster.size()) throw Error("clustered_covariance: length mismatch");
    std::map<std::size_t, Eigen::VectorXd> scores;
    for (Eigen::Index i = 0; i < n; ++i) {
        auto [it, fresh] = scores.try_emplace(cluster[static_cast<std::size_t>(i)], Eigen::VectorXd::Zero(k));
        it->second += x.row(i).transpose() * resid(i);
    }
    const double g = static_cast<double>(scores.size());
    if (scores.size() < 2) throw InsufficientDataError("clustered standard errors need at least two clusters");
    if (n <= k) throw InsufficientDataError("clustered standard errors need more observations than parameters");
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (const auto& [c, s] : scores) meat += s * s.transpose();
    const double correction = g / (g - 1.0) * static_cast<double>(n - 1) / static_cast<double>(n - k);
    return correction * xtx_inv * meat * xtx_inv;
}

FitResult within_fe_ols(const PanelDataset& p, const RegressionSpec& spec, std::span<const std::size_t> subset) {
    FitResult fit;
    fit.estimator = "fe";
    fit.spec = spec;

    std::vector<std::string> names = static_regressors(spec);
    std::vector<std::string> needed = names;
    needed.push_back(spec.outcome);
    std::vector<std::size_t> rows = complete_rows(p, needed, subset);

    if (spec.firm_effects) {
        std::map<std::size_t, std::size_t> count;
        for (std::size_t r : rows) ++count[p.firm[r]];
        std::vector<std::size_t> kept;
        for (std::size_t r : rows) {
            if (count[p.firm[r]] > 1) kept.push_back(r);
        }
        for (const auto& [f, c] : count) fit.singletons_dropped += (c == 1);
        rows = std::move(kept);
    }
    if (rows.empty()) throw InsufficientDataError("no complete observations");

    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::VectorXd y(n);
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(names.size()));
    {
        const auto& ycol = p.column(spec.outcome);
        for (Eigen::Index i = 0; i < n; ++i) y(i) = ycol[rows[static_cast<std::size_t>(i)]];
        for (std::size_t j = 0; j < names.size(); ++j) {
            const auto& c = p.column(names[j]);
            for (Eigen::Index i = 0; i < n; ++i) x(i, static_cast<Eigen::Index>(j)) = c[rows[static_cast<std::size_t>(i)]];
        }
    }
    std::vector<std::size_t> cluster(rows.size());
    std::vector<std::size_t> firms_used;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        cluster[i] = p.firm[rows[i]];
        firms_used.push_back(cluster[i]);
    }
    std::sort(firms_used.begin(), firms_used.end());
    firms_used.erase(std::unique(firms_used.begin(), firms_used.end()), firms_used.end());
    const std::size_t n_firms = firms_used.size();

    // Time dummies, first category as reference.
    std::vector<std::int64_t> categories;
    std::vector<std::int64_t> key(rows.size(), 0);
    if (spec.time_effects != TimeEffects::None) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            key[i] = spec.time_effects == TimeEffects::Year ? p.year[rows[i]] : p.time[rows[i]];
        }
        categories = key;
        std::sort(categories.begin(), categories.end());
        categories.erase(std::unique(categories.begin(), categories.end()), categories.end());
        if (!categories.empty()) categories.erase(categories.begin());
    }
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(categories.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto it = std::lower_bound(categories.begin(), categories.end(), key[i]);
        if (it != categories.end() && *it == key[i]) {
            d(static_cast<Eigen::Index>(i), it - categories.begin()) = 1.0;
        }
    }

    // Within transformation by firm.
    auto demean = [&](auto& m) {
        Eigen::Index begin = 0;
        while (begin < n) {
            Eigen::Index end = begin;
            while (end < n && cluster[static_cast<std::size_t>(end)] == cluster[static_cast<std::size_t>(begin)]) ++end;
            auto block = m.middleRows(begin, end - begin);
            const auto means = block.colwise().mean().eval();
            block.rowwise() -= means;
            begin = end;
        }
    };
    Eigen::VectorXd y_w = y;
    Eigen::MatrixXd x_w = x;
    Eigen::MatrixXd d_w = d;
    if (spec.firm_effects) {
        demean(y_w);
        demean(x_w);
        demean(d_w);
    }

    // Drop regressors without usable variation.
    std::vector<Eigen::Index> keep;
    for (std::size_t j = 0; j < names.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        bool degenerate;
        if (spec.firm_effects) {
            const double scale = std::max(1.0, x.col(jj).cwiseAbs().maxCoeff());
            degenerate = x_w.col(jj).cwiseAbs().maxCoeff() <= 1e-12 * scale;
        } else {
            degenerate = !linalg::constant_columns(x.col(jj)).empty();
        }
        if (degenerate) fit.dropped_columns.push_back(names[j]);
        else keep.push_back(jj);
    }
    std::vector<Eigen::Index> keep_d;
    if (d_w.cols() > 0) {
        auto dep = linalg::dependent_columns(d_w);
        for (Eigen::Index j = 0; j < d_w.cols(); ++j) {
            bool zero = d_w.col(j).cwiseAbs().maxCoeff() <= 1e-12;
            if (!zero && std::find(dep.begin(), dep.end(), static_cast<std::size_t>(j)) == dep.end()) {
                keep_d.push_back(j);
            }
        }
    }

    // Mean-augmented design [1, x~ + xbar, d~ + dbar].
    const auto k = static_cast<Eigen::Index>(1 + keep.size() + keep_d.size());
    Eigen::MatrixXd z(n, k);
    Eigen::VectorXd yz = y_w;
    std::vector<std::string> z_names = {"const"};
    z.col(0).setOnes();
    Eigen::Index col = 1;
    for (Eigen::Index j : keep) {
        z.col(col) = x_w.col(j);
        if (spec.firm_effects) z.col(col).array() += x.col(j).mean();
        z_names.push_back(names[static_cast<std::size_t>(j)]);
        ++col;
    }
    for (Eigen::Index j : keep_d) {
        z.col(col) = d_w.col(j);
        if (spec.firm_effects) z.col(col).array() += d.col(j).mean();
        z_names.push_back(fmt::format("time:{}", categories[static_cast<std::size_t>(j)]));
        ++col;
    }
    if (spec.firm_effects) yz.array() += y.mean();

    const Eigen::Index absorbed = spec.firm_effects ? static_cast<Eigen::Index>(n_firms) - 1 : 0;
    if (n - k - absorbed <= 0) {
        throw InsufficientDataError(fmt::format("{} observations for {} parameters and {} absorbed effects", n, k, absorbed));
    }
    linalg::LeastSquares ls = linalg::solve(z, yz, z_names);

    Eigen::MatrixXd cov;
    switch (spec.se) {
        case SePolicy::Classical: {
            const double s2 = ls.residuals.squaredNorm() / static_cast<double>(n - k - absorbed);
            cov = s2 * ls.xtx_inv;
            break;
        }
        case SePolicy::ClusteredFirm:
            cov = clustered_covariance(z, ls.residuals, ls.xtx_inv, cluster);
            break;
        case SePolicy::Robust: {
            Eigen::MatrixXd meat = z.transpose() * ls.residuals.cwiseAbs2().asDiagonal() * z;
            cov = static_cast<double>(n) / static_cast<double>(n - k - absorbed) * ls.xtx_inv * meat * ls.xtx_inv;
            break;
        }
    }

    // Report slopes first, constant last; time dummies are not reported.
    std::vector<Eigen::Index> order;
    for (Eigen::Index j = 1; j <= static_cast<Eigen::Index>(keep.size()); ++j) order.push_back(j);
    order.push_back(0);
    fit.cov.resize(static_cast<Eigen::Index>(order.size()), static_cast<Eigen::Index>(order.size()));
    for (std::size_t a = 0; a < order.size(); ++a) {
        for (std::size_t b = 0; b < order.size(); ++b) {
            fit.cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = cov(order[a], order[b]);
        }
        const Eigen::Index j = order[a];
        Term t;
        t.name = z_names[static_cast<std::size_t>(j)];
        t.coef = ls.coef(j);
        t.se = std::sqrt(std::max(cov(j, j), 0.0));
        t.t = t.se > 0.0 ? t.coef / t.se : std::nan("");
        fit.terms.push_back(t);
    }
    for (Eigen::Index j : keep) {
        std::vector<double> v(x.col(j).data(), x.col(j).data() + n);
        fit.regressor_sd.emplace_back(names[static_cast<std::size_t>(j)], linalg::sample_sd(v).value_or(std::nan("")));
    }
    fit.n_obs = rows.size();
    fit.n_firms = n_firms;
    return fit;
}

FitResult estimate(const PanelDataset& p, const RegressionSpec& spec, std::span<const std::size_t> rows) {
    if (spec.dynamic) {
        if (!rows.empty()) {
            PanelDataset sub = select_rows(p, rows);
            return diff_gmm(sub, spec);
        }
        return diff_gmm(p, spec);
    }
    return within_fe_ols(p, spec, rows);
}

SplitResult median_split(const PanelDataset& p, const std::string& variable, std::span<const std::size_t> rows) {
    const auto& v = p.column(variable);
    std::vector<double> values;
    std::vector<std::size_t> present;
    for (std::size_t r : rows) {
        if (std::isfinite(v[r])) {
            values.push_back(v[r]);
            present.push_back(r);
        }
    }
    if (values.empty()) throw InsufficientDataError(fmt::format("split variable '{}' has no values", variable));
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) throw Error(fmt::format("split variable '{}' is constant", variable));
    SplitResult out;
    out.cutoff = *linalg::median(values);
    for (std::size_t r : present) (v[r] > out.cutoff ? out.high : out.low).push_back(r);
    return out;
}

}  // namespace revpanel::econ
