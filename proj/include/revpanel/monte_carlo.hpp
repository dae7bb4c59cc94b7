#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "revpanel/econometrics.hpp"
#include "revpanel/synth.hpp"

namespace revpanel::synth {

enum class McEstimator { Gmm, WithinFe };

std::optional<McEstimator> parse_mc_estimator(std::string_view s);
std::string_view to_string(McEstimator e);

struct McSpec {
    McEstimator estimator = McEstimator::Gmm;
    DgpSpec dgp;
    std::size_t replications = 200;
    econ::GmmOptions gmm;
    bool include_feature = true;  // f enters as a regressor
    unsigned threads = 0;         // 0: hardware concurrency
    double level = 0.05;
};

struct McReplication {
    std::size_t rep = 0;
    bool ok = false;
    std::string error;
    double rho_hat = 0.0;
    double rho_se = 0.0;
    std::optional<double> ar1_p, ar2_p;
};

struct McSummary {
    McEstimator estimator = McEstimator::Gmm;
    double truth = 0.0;
    std::size_t replications = 0;
    std::size_t succeeded = 0;
    double mean = 0.0;
    double bias = 0.0;
    double rmse = 0.0;
    double sd = 0.0;              // NaN below two successful replications
    double rejection_rate = 0.0;  // H0: rho = truth at `level`
    std::optional<double> ar1_rejection_rate, ar2_rejection_rate;
    std::vector<McReplication> reps;  // in replication order
};

// Name of the lagged-outcome term in both estimators.
inline constexpr const char* kRhoTerm = "L1.y";

// Regression spec used for one simulated panel.
econ::RegressionSpec mc_regression(const McSpec& spec);

McReplication run_replication(const McSpec& spec, std::size_t rep);

// Replication r simulates from substream (dgp.seed, r). Failures are
// recorded in the summary and excluded from the moments.
McSummary run_monte_carlo(const McSpec& spec);

void write_mc_csv(const std::filesystem::path& path, const McSummary& summary);
std::string mc_summary_markdown(const McSummary& summary, const McSpec& spec);

}  // namespace revpanel::synth
