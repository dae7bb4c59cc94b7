#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "revpanel/calendar.hpp"
#include "revpanel/characteristics.hpp"
#include "revpanel/ingest.hpp"
#include "revpanel/panel_dataset.hpp"

namespace revpanel::synth {

// ------------------------------------------------------------- reviews

// Terms used to build synthetic texts; every filler is free of lexicon
// matches and no term contains the separator.
struct DemoLexicon {
    std::vector<std::string> positive;
    std::vector<std::string> negative;
    std::vector<std::string> filler;
    std::string separator;
};
const DemoLexicon& demo_lexicon();

struct ReviewSpec {
    int n_firms = 3;
    Date start = *parse_date("2015-01-05");  // Monday of the first week
    int n_weeks = 60;
    // Expected reviews per firm-week by polarity class (negative, positive,
    // neutral). Counts are independent Poisson draws unless exact_total is
    // set, in which case exactly that many original reviews are spread
    // multinomially over the same cells.
    std::array<double, 3> rates = {3.0, 5.0, 3.0};
    std::optional<std::size_t> exact_total;
    int products_per_firm = 12;
    std::size_t planted_duplicates = 0;
    std::vector<std::string> sectors;  // cycled over firms when non-empty
    std::uint64_t seed = 1;
};

struct WeekTruth {
    std::string firm_id;
    WeekIndex week;
    std::uint32_t n_reviews = 0;
    std::uint32_t n_neg = 0;
    std::uint32_t n_pos = 0;
    std::array<std::uint32_t, 5> stars{};
};

struct ReviewCorpus {
    std::vector<ingest::RawReview> rows;  // file order, planted copies included
    std::vector<WeekTruth> truth;         // originals only, sorted by firm and week
    std::size_t duplicates = 0;
    std::vector<std::string> firm_ids;
};

ReviewCorpus gen_reviews(const ReviewSpec& spec);

void write_review_dump(const std::filesystem::path& path, const std::vector<ingest::RawReview>& rows,
                       ingest::InputFormat format);

// ------------------------------------------------------ market series

struct MarketSpec {
    int pre_weeks = 12;  // market history before the first review week
    double mu = 0.001;   // weekly mean return
    double beta_neg = -0.002;  // planted effect of CNST_t on R_{t+1}
    double beta_pos = 0.0;     // planted effect of CPST_t on R_{t+1}
    double weekly_noise_sd = 0.01;
    double daily_noise_sd = 0.004;
    int history_years = 5;  // financial history before the first review year
    std::uint64_t seed = 1;
};

// Daily market, factor, quarterly financial and monthly CCIs series whose
// weekly returns follow R_{t+1} = mu + beta_neg CNST_t + beta_pos CPST_t + e
// with CNST/CPST taken from the review truth.
chars::MarketInputs gen_market(const ReviewSpec& reviews, const ReviewCorpus& corpus, const MarketSpec& spec);

// ------------------------------------------------------------- bundles

struct BundleSpec {
    ReviewSpec reviews;
    MarketSpec market;
    ingest::InputFormat format = ingest::InputFormat::Csv;
};

BundleSpec toy_preset(std::uint64_t seed);
BundleSpec table_preset(std::uint64_t seed);
std::optional<BundleSpec> preset(std::string_view name, std::uint64_t seed);

struct BundleFiles {
    std::filesystem::path reviews, market, factors, financials, ccis, manifest, positive, negative;
};

BundleFiles bundle_files(const std::filesystem::path& dir, ingest::InputFormat format);

// Writes the review dump, market inputs, demo lexicon and a JSON manifest
// with the generating parameters and per-firm-week truth.
BundleFiles write_bundle(const std::filesystem::path& dir, const BundleSpec& spec);

// Per-firm-week truth stored in a manifest.
std::vector<WeekTruth> read_manifest_truth(const std::filesystem::path& manifest);

// ----------------------------------------------------------- panel DGP

struct DgpSpec {
    std::size_t n_firms = 200;
    std::size_t n_weeks = 10;
    double rho = 0.5;    // coefficient on y_{t-1}
    double beta = 0.0;   // coefficient on the feature f
    std::vector<double> gamma;  // coefficients on controls x1..xk
    double firm_effect_sd = 1.0;
    double time_effect_sd = 0.0;
    double noise_sd = 1.0;
    double feature_rho = 0.5;  // AR(1) persistence of f and the controls
    double feature_sd = 1.0;
    double error_ar1 = 0.0;  // serial correlation of the idiosyncratic error
    double error_ar2 = 0.0;
    std::size_t burn_in = 50;
    std::uint64_t seed = 1;
};

// y_{i,t} = rho y_{i,t-1} + beta f_{i,t} + gamma'x_{i,t} + eta_i + lambda_t + e_{i,t}.
// Columns: y, f, x1..xk and L1.y. Firms are labelled f0001..., time runs
// 1..n_weeks and year is constant.
econ::PanelDataset gen_panel_dgp(const DgpSpec& spec, std::uint64_t stream = 0);

}  // namespace revpanel::synth
