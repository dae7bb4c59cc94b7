#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "revpanel/panel_dataset.hpp"

namespace revpanel::econ {

enum class TimeEffects { None, Year, Week };
enum class SePolicy { Classical, ClusteredFirm, Robust };

std::optional<TimeEffects> parse_time_effects(std::string_view s);
std::optional<SePolicy> parse_se_policy(std::string_view s);
std::string_view to_string(TimeEffects t);
std::string_view to_string(SePolicy s);

struct GmmOptions {
    int min_lag = 2;
    int max_lag = 4;
    bool collapse = false;
    bool time_dummies = false;  // differenced period dummies as exogenous regressors
    double weak_instrument_f = 10.0;
};

struct RegressionSpec {
    std::string outcome;
    std::string regressor;  // may be empty
    std::vector<std::string> controls;
    bool firm_effects = true;
    TimeEffects time_effects = TimeEffects::Year;
    bool dynamic = false;
    int lag_depth = 1;            // lags of the outcome in dynamic models
    bool lagged_controls = false;  // use controls at t-1 (dynamic models)
    GmmOptions gmm;
    SePolicy se = SePolicy::ClusteredFirm;
};

struct Term {
    std::string name;
    double coef = 0.0;
    double se = 0.0;
    double t = 0.0;  // coef / se, NaN when se is not positive
};

struct FitResult {
    std::string estimator;  // "fe" or "gmm"
    RegressionSpec spec;
    std::vector<Term> terms;  // lagged outcome, regressor, controls, const
    Eigen::MatrixXd cov;      // over terms, in order
    std::size_t n_obs = 0;
    std::size_t n_firms = 0;
    std::size_t singletons_dropped = 0;
    std::size_t n_instruments = 0;
    std::optional<double> first_stage_f;
    std::optional<double> ar1_z, ar1_p, ar2_z, ar2_p;
    std::vector<std::string> dropped_columns;
    std::vector<std::string> warnings;
    // Sample standard deviation of each reported regressor on the
    // estimation sample, for one-sigma effects.
    std::vector<std::pair<std::string, double>> regressor_sd;

    const Term* find(std::string_view name) const;
    std::optional<double> sd_of(std::string_view name) const;
};

// Two-way fixed-effects least squares. Firm effects are absorbed by the
// within transformation, time effects by dummies at the spec's level. The
// constant is recovered from the mean-augmented design. Singleton firms are
// dropped, regressors without within variation are dropped and listed, any
// remaining collinearity raises RankDeficientError. `rows` restricts the
// sample (all rows when empty).
FitResult within_fe_ols(const PanelDataset& p, const RegressionSpec& spec,
                        std::span<const std::size_t> rows = {});

// Firm-clustered sandwich (X'X)^-1 (sum_g X_g'e_g e_g'X_g) (X'X)^-1 scaled by
// G/(G-1) * (n-1)/(n-k). Throws below two clusters.
Eigen::MatrixXd clustered_covariance(const Eigen::MatrixXd& x, const Eigen::VectorXd& resid,
                                     const Eigen::MatrixXd& xtx_inv,
                                     std::span<const std::size_t> cluster);

// Per-firm blocks of the differenced system, kept for diagnostics.
struct GmmFirmBlock {
    std::vector<std::int64_t> times;
    Eigen::MatrixXd x;
    Eigen::MatrixXd z;
    Eigen::VectorXd resid;
};

struct GmmMoments {
    std::vector<GmmFirmBlock> firms;
    Eigen::MatrixXd a_inv;  // (X'Z W Z'X)^-1
    Eigen::MatrixXd xzw;    // X'Z W
    Eigen::MatrixXd cov;    // robust one-step covariance of the slopes
};

// One-step Arellano-Bond difference GMM. Levels of the outcome lagged
// min_lag..max_lag instrument the differenced equation; exogenous
// regressors instrument themselves. Reports robust standard errors and the
// AR(1)/AR(2) tests.
FitResult diff_gmm(const PanelDataset& p, const RegressionSpec& spec, GmmMoments* moments = nullptr);

// Arellano-Bond z statistic for order-m serial correlation in the
// differenced residuals; nullopt when no firm has residuals m periods
// apart.
std::optional<double> ar_test(const GmmMoments& m, int order);

// Dispatches on spec.dynamic.
FitResult estimate(const PanelDataset& p, const RegressionSpec& spec, std::span<const std::size_t> rows = {});

// Regressors of a static spec, in design order.
std::vector<std::string> static_regressors(const RegressionSpec& spec);

struct SplitResult {
    double cutoff = 0.0;
    std::vector<std::size_t> high;  // value > cutoff
    std::vector<std::size_t> low;   // value <= cutoff
};

// Median split of `rows` on `variable`; rows missing the variable are left
// out of both halves. Throws when the variable is constant.
SplitResult median_split(const PanelDataset& p, const std::string& variable, std::span<const std::size_t> rows);

}  // namespace revpanel::econ
