#pragma once

// Random unbalanced panels and helpers shared by the estimator tests.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "revpanel/econometrics.hpp"

namespace panels {

using namespace revpanel;
using namespace revpanel::econ;

inline std::string firm_label(std::size_t i) { return "firm" + std::to_string(100 + i); }

// Unbalanced panel y = 0.7 x1 - 1.2 x2 + eta_i + lambda_t + e with x1
// correlated with eta; every firm keeps at least two rows.
inline PanelDataset random_panel(std::mt19937_64& gen, std::size_t n_firms, std::int64_t n_periods) {
    std::normal_distribution<double> n01(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> lambda(static_cast<std::size_t>(n_periods));
    for (auto& l : lambda) l = 2.0 * n01(gen);
    std::vector<std::string> labels;
    std::vector<std::int64_t> time;
    std::vector<int> year;
    std::vector<double> y, x1, x2;
    for (std::size_t i = 0; i < n_firms; ++i) {
        const double eta = 3.0 * n01(gen);
        std::vector<std::int64_t> ts;
        while (ts.size() < 2) {
            ts.clear();
            for (std::int64_t t = 1; t <= n_periods; ++t)
                if (u01(gen) < 0.8) ts.push_back(t);
        }
        for (auto t : ts) {
            const double a = n01(gen) + 0.5 * eta;
            const double b = n01(gen);
            labels.push_back(firm_label(i));
            time.push_back(t);
            year.push_back(2000 + static_cast<int>((t - 1) / 3));
            x1.push_back(a);
            x2.push_back(b);
            y.push_back(0.7 * a - 1.2 * b + eta + lambda[static_cast<std::size_t>(t - 1)] + 0.5 * n01(gen));
        }
    }
    PanelDataset p = make_panel(labels, time, year);
    p.set_column("y", y);
    p.set_column("x1", x1);
    p.set_column("x2", x2);
    return p;
}

inline RegressionSpec fe_spec(TimeEffects te, SePolicy se = SePolicy::ClusteredFirm) {
    RegressionSpec s;
    s.outcome = "y";
    s.regressor = "x1";
    s.controls = {"x2"};
    s.time_effects = te;
    s.se = se;
    return s;
}

inline Eigen::VectorXd slopes(const FitResult& f, const std::vector<std::string>& names) {
    Eigen::VectorXd b(static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        const Term* t = f.find(names[j]);
        b(static_cast<Eigen::Index>(j)) = t ? t->coef : std::nan("");
    }
    return b;
}

inline Eigen::VectorXd oracle_slopes(const PanelDataset& p, TimeEffects te) {
    const auto n = static_cast<Eigen::Index>(p.rows());
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    std::vector<std::size_t> firm(p.firm.begin(), p.firm.end());
    std::vector<long> group;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(i);
        x(i, 0) = p.column("x1")[r];
        x(i, 1) = p.column("x2")[r];
        y(i) = p.column("y")[r];
        group.push_back(te == TimeEffects::Year ? p.year[r] : static_cast<long>(p.time[r]));
    }
    return oracle::dummy_ols(x, y, firm, group, te != TimeEffects::None);
}

// Firm-demeaned copy of the named columns.
inline PanelDataset firm_demeaned(const PanelDataset& p, const std::vector<std::string>& names) {
    PanelDataset out = p;
    for (const auto& name : names) {
        std::vector<double> v = p.column(name);
        std::size_t begin = 0;
        while (begin < v.size()) {
            std::size_t end = begin;
            while (end < v.size() && p.firm[end] == p.firm[begin]) ++end;
            double m = 0.0;
            for (std::size_t r = begin; r < end; ++r) m += v[r];
            m /= static_cast<double>(end - begin);
            for (std::size_t r = begin; r < end; ++r) v[r] -= m;
            begin = end;
        }
        out.set_column(name, v);
    }
    return out;
}

}  // namespace panels
