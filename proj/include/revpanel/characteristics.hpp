#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "revpanel/calendar.hpp"

namespace revpanel::chars {

// ---------------------------------------------------------------- inputs

struct DailyBar {
    Date date{};
    double ret = 0.0;
    double volume = 0.0;        // traded value, currency units
    double tradable_cap = 0.0;  // market cap of tradable shares
    double turnover = 0.0;      // shares traded / shares outstanding
};

// firm -> bars sorted by date
using MarketSeries = std::map<std::string, std::vector<DailyBar>>;

struct FactorDay {
    Date date{};
    double mkt = 0.0;
    double smb = 0.0;
    double hml = 0.0;
    double umd = 0.0;
};

// Sorted by date.
using FactorSeries = std::vector<FactorDay>;

struct QuarterlyFinancials {
    Quarter quarter;
    std::optional<double> total_assets;
    std::optional<double> net_profit;
    std::optional<double> operating_profit;
    std::optional<double> revenue_per_share;
    std::optional<double> cfo;
    std::optional<double> accruals;
    std::optional<double> book_equity;
    std::optional<double> sales_expense;
    std::optional<double> operating_revenue;
    std::optional<double> rd_expense;
    std::optional<double> dividends;
    std::optional<double> book_value;
    std::optional<double> market_value;
    std::optional<double> pre_extraordinary_income;
    std::optional<bool> pays_dividend;
};

// quarter ordinal -> row
using FirmFinancials = std::map<std::int64_t, QuarterlyFinancials>;
// firm -> quarters
using FinancialHistory = std::map<std::string, FirmFinancials>;

struct CcisObservation {
    Month month;
    double value = 0.0;
};

struct MarketInputs {
    MarketSeries market;
    FactorSeries factors;
    FinancialHistory financials;
    std::vector<CcisObservation> ccis;
};

// Readers validate ranges (volume >= 0, tradable_cap > 0) and throw
// revpanel::Error naming the file and line on violations.
MarketSeries read_market_csv(const std::filesystem::path& path);
FactorSeries read_factors_csv(const std::filesystem::path& path);
FinancialHistory read_financials_csv(const std::filesystem::path& path);
std::vector<CcisObservation> read_ccis_csv(const std::filesystem::path& path);

void write_market_csv(const std::filesystem::path& path, const MarketSeries& market);
void write_factors_csv(const std::filesystem::path& path, const FactorSeries& factors);
void write_financials_csv(const std::filesystem::path& path, const FinancialHistory& financials);
void write_ccis_csv(const std::filesystem::path& path, const std::vector<CcisObservation>& ccis);

// ------------------------------------------------------- market controls

// Sample std of residuals from regressing returns on (1, mkt, smb, hml).
// nullopt with fewer than four observations.
std::optional<double> compute_ivol(std::span<const double> returns, std::span<const double> mkt,
                                   std::span<const double> smb, std::span<const double> hml);

// OLS slope of stock on market returns over the given (already windowed)
// observations; nullopt below `min_obs` or with a constant market series.
std::optional<double> compute_beta(std::span<const double> stock, std::span<const double> market,
                                   std::size_t min_obs = 30);

// Mean of |r| / volume over days with positive volume, times `scale`.
std::optional<double> compute_illiq(std::span<const double> returns, std::span<const double> volume,
                                    double scale = 1e6);

// Compounded return over the given daily returns.
double compound_return(std::span<const double> daily);

// ------------------------------------------------------ simple controls

std::optional<double> size_from_cap(double tradable_cap);
std::optional<double> roa(const QuarterlyFinancials& q);
std::optional<double> book_to_market(const QuarterlyFinancials& q);
std::optional<double> gross_profitability(const QuarterlyFinancials& q);
std::optional<double> asset_growth(const QuarterlyFinancials& q, const QuarterlyFinancials& prev);
std::optional<double> advertising(const QuarterlyFinancials& q);
std::optional<double> research(const QuarterlyFinancials& q);

// --------------------------------------------------------- transparency

struct AnnualFinancials {
    int year = 0;
    std::optional<double> total_assets;  // year-end (Q4)
    std::optional<double> net_income;    // sum of four quarters
    std::optional<double> cfo;
    std::optional<double> accruals;
    bool accruals_derived = false;  // accruals filled as NI - CFO
};

// Flows summed over Q1..Q4 (all four required); assets taken at Q4.
std::map<int, AnnualFinancials> annualize(const FirmFinancials& quarters);

// ACC_y / TA_{y-1}.
std::optional<double> compute_ea(const std::map<int, AnnualFinancials>& years, int year);
// Std(CFO_{y-k}/A_{y-k-1}) / Std(NI_{y-k}/A_{y-k-1}), k = 0..3.
std::optional<double> compute_es(const std::map<int, AnnualFinancials>& years, int year);

// ------------------------------------------------------------ surprises

struct SurpriseWindow {
    int quarters = 8;      // trailing quarters q-W..q-1
    int min_quarters = 4;
};

// (REV_q - REV_{q-4}) / sd of (REV_k - REV_{k-4}) over the window.
std::optional<double> compute_sur(const FirmFinancials& f, Quarter q, SurpriseWindow w = {});
// (E_q - E_{q-4}) / sd of E_k over the window, E = operating profit.
std::optional<double> compute_sue(const FirmFinancials& f, Quarter q, SurpriseWindow w = {});

std::optional<double> clamp_symmetric(std::optional<double> v, std::optional<double> bound);

// --------------------------------------------------------- profit models

enum class ProfitModel { Hvz, Vol };

std::string_view to_string(ProfitModel m);

struct VolWindow {
    int quarters = 8;  // q-7..q
    int min_quarters = 6;
};

struct ProfitRegressors {
    double va = 0.0;    // V / A
    double dd = 0.0;    // 1 when no dividend paid
    double db = 0.0;    // D / B
    double prof = 0.0;  // ROA
    std::optional<double> vol;
};

std::optional<ProfitRegressors> profit_regressors(const FirmFinancials& f, Quarter q, VolWindow w = {});
// Trailing std of quarterly ROA.
std::optional<double> earnings_volatility(const FirmFinancials& f, Quarter q, VolWindow w = {});

struct ProfitObservation {
    std::string firm_id;
    ProfitRegressors x;  // at quarter q
    double prof_next = 0.0;  // ROA at q+1
};

struct ProfitModelFit {
    Quarter quarter;
    ProfitModel model = ProfitModel::Hvz;
    std::vector<std::string> columns;  // retained, in design order
    Eigen::VectorXd coef;
    std::vector<std::string> dropped;  // constant regressors removed
    std::size_t n_firms = 0;

    double predict(const ProfitRegressors& x) const;
};

std::vector<std::string> profit_columns(ProfitModel m);

// Cross-sectional OLS of Prof_{q+1} on the model's regressors at q. Throws
// InsufficientDataError below (parameters + 5) firms and RankDeficientError
// on collinear regressors.
ProfitModelFit fit_profit_model(const std::vector<ProfitObservation>& cross_section, Quarter q,
                                ProfitModel model);

// Every firm with complete regressors at q and ROA at q+1.
std::vector<ProfitObservation> profit_cross_section(const FinancialHistory& h, Quarter q,
                                                    ProfitModel model, VolWindow w = {});

// quarter ordinal -> fit; quarters whose fit fails are absent.
std::map<std::int64_t, ProfitModelFit> fit_all_quarters(const FinancialHistory& h, ProfitModel model,
                                                        VolWindow w = {});

// Realized ROA_{q+1} minus the prediction of the quarter-(q-1) fit applied
// to quarter-q regressors. `target` is quarter q+1.
std::optional<double> profitability_shock(const FirmFinancials& f, Quarter target, ProfitModel model,
                                          const std::map<std::int64_t, ProfitModelFit>& fits,
                                          VolWindow w = {});

// ------------------------------------------------- frequency conversion

struct Period {
    Date first{};
    Date last{};
    double value = 0.0;
};

// Step expansion: each week takes the value of the period containing the
// Monday of (week - lag_weeks). Periods must not overlap.
std::vector<std::optional<double>> to_weekly(std::vector<Period> periods,
                                             const std::vector<WeekIndex>& weeks, int lag_weeks = 0);

// ------------------------------------------------------ weekly assembly

struct ControlRow {
    std::string firm_id;
    WeekIndex week;
    std::optional<double> ret;  // compounded weekly stock return
    std::optional<double> size;
    std::optional<double> bm;
    std::optional<double> roa;
    std::optional<double> ivol;
    std::optional<double> ag;
    std::optional<double> illiq;
    std::optional<double> beta;
    std::optional<double> gp;
    std::optional<double> turn;
    std::optional<double> ad;
    std::optional<double> rd;
    std::optional<double> ccis;
    std::optional<double> ea;
    std::optional<double> es;
    std::optional<double> sur;
    std::optional<double> sue;
    std::optional<double> prof_shock_hvz;
    std::optional<double> prof_shock_vol;
};

// Column names in output order (after firm_id, iso_year, iso_week).
const std::vector<std::string>& control_columns();
std::optional<double> control_value(const ControlRow& row, std::string_view column);
void set_control_value(ControlRow& row, std::string_view column, std::optional<double> v);

struct CharacteristicsOptions {
    WeekConvention convention = WeekConvention::Iso;
    std::size_t beta_window = 50;
    std::size_t beta_min_obs = 30;
    double illiq_scale = 1e6;
    SurpriseWindow surprise;
    VolWindow vol;
    std::optional<double> surprise_clamp;  // e.g. 3.5; off by default
    int publication_lag_weeks = 0;
};

struct ControlsResult {
    std::vector<ControlRow> rows;  // sorted by firm, week
    std::size_t derived_accrual_years = 0;
};

// One row per firm per week spanned by that firm's daily market data.
ControlsResult build_controls(const MarketInputs& inputs, const CharacteristicsOptions& options);

void write_controls_csv(const std::filesystem::path& path, const std::vector<ControlRow>& rows);

}  // namespace revpanel::chars
