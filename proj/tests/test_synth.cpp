#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>

#include "revpanel/characteristics.hpp"
#include "revpanel/econometrics.hpp"
#include "revpanel/ingest.hpp"
#include "revpanel/monte_carlo.hpp"
#include "revpanel/panel.hpp"
#include "revpanel/synth.hpp"
#include "test_util.hpp"

using namespace revpanel;
using namespace revpanel::synth;

namespace {

sentiment::Lexicon demo_terms() {
    return sentiment::Lexicon(demo_lexicon().positive, demo_lexicon().negative);
}

// Dedup, classify and aggregate a generated corpus the way the pipeline does.
std::vector<panel::FirmWeekRow> recover(const ReviewCorpus& corpus, std::size_t* dropped = nullptr) {
    const auto records = ingest::deduplicate(corpus.rows, dropped);
    return panel::aggregate_firm_week(panel::classify_reviews(records, demo_terms()));
}

void check_against_truth(const std::vector<panel::FirmWeekRow>& rows, const std::vector<WeekTruth>& truth) {
    REQUIRE(rows.size() == truth.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].firm_id == truth[i].firm_id);
        CHECK(rows[i].week == truth[i].week);
        CHECK(rows[i].n_reviews == truth[i].n_reviews);
        CHECK(rows[i].n_neg == truth[i].n_neg);
        CHECK(rows[i].n_pos == truth[i].n_pos);
        CHECK(rows[i].star_counts == truth[i].stars);
    }
}

// Lagged columns start with NaN, so compare bit patterns.
bool same_columns(const econ::PanelDataset& a, const econ::PanelDataset& b) {
    if (a.columns.size() != b.columns.size()) return false;
    for (const auto& [name, col] : a.columns) {
        auto it = b.columns.find(name);
        if (it == b.columns.end() || it->second.size() != col.size()) return false;
        for (std::size_t i = 0; i < col.size(); ++i)
            if (std::bit_cast<std::uint64_t>(col[i]) != std::bit_cast<std::uint64_t>(it->second[i])) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("demo lexicon fillers carry no sentiment") {
    const auto lex = demo_terms();
    for (const auto& f : demo_lexicon().filler) CHECK(lex.count(f) == sentiment::SentimentCount{0, 0});
    for (const auto& t : demo_lexicon().positive) CHECK(lex.count(t) == sentiment::SentimentCount{0, 1});
    for (const auto& t : demo_lexicon().negative) CHECK(lex.count(t) == sentiment::SentimentCount{1, 0});
}

TEST_CASE("one firm, one week: three negative and one positive review") {
    bool seen = false;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        ReviewSpec spec;
        spec.n_firms = 1;
        spec.n_weeks = 1;
        spec.rates = {3.0, 1.0, 0.0};
        spec.exact_total = 4;
        spec.seed = seed;
        const auto corpus = gen_reviews(spec);
        const auto rows = recover(corpus);
        check_against_truth(rows, corpus.truth);
        if (corpus.truth.size() == 1 && corpus.truth[0].n_neg == 3 && corpus.truth[0].n_pos == 1) {
            seen = true;
            CHECK(rows[0].n_neg == 3);
            CHECK(rows[0].n_pos == 1);
            CHECK(rows[0].n_reviews == 4);
        }
    }
    CHECK(seen);
}

TEST_CASE("planted duplicates are exactly what dedup removes") {
    ReviewSpec spec;
    spec.n_firms = 4;
    spec.n_weeks = 20;
    spec.planted_duplicates = 37;
    spec.seed = 9;
    const auto corpus = gen_reviews(spec);
    std::size_t dropped = 0;
    const auto rows = recover(corpus, &dropped);
    CHECK(dropped == 37);
    CHECK(corpus.duplicates == 37);
    check_against_truth(rows, corpus.truth);
    std::set<std::string> reviewers;
    for (const auto& r : corpus.rows) reviewers.insert(r.reviewer_id);
    CHECK(reviewers.size() == corpus.rows.size() - 37);
}

TEST_CASE("toy preset size") {
    const auto spec = toy_preset(1);
    const auto corpus = gen_reviews(spec.reviews);
    CHECK(corpus.rows.size() == 2000);
    CHECK(corpus.duplicates == 20);
    CHECK(corpus.firm_ids.size() == 3);
}

TEST_CASE("bundles round-trip through ingest and controls without dropped rows") {
    for (auto format : {ingest::InputFormat::Csv, ingest::InputFormat::Jsonl}) {
        auto spec = toy_preset(4);
        spec.reviews.n_weeks = 20;
        spec.reviews.exact_total = 500;
        spec.reviews.planted_duplicates = 7;
        spec.format = format;
        const auto dir = scratch_dir(format == ingest::InputFormat::Csv ? "bundle_csv" : "bundle_jsonl");
        const auto files = write_bundle(dir, spec);
        ingest::IngestOptions o;
        o.format = format;
        const auto result = ingest::ingest_files({files.reviews}, o);
        CHECK(result.report.records_read == 507);
        CHECK(result.report.invalid_dropped == 0);
        CHECK(result.report.duplicates_dropped == 7);
        CHECK(result.report.records_kept == 500);

        const auto lex = sentiment::load_lexicon(files.positive, files.negative);
        const auto rows = panel::aggregate_firm_week(panel::classify_reviews(result.records, lex));
        check_against_truth(rows, read_manifest_truth(files.manifest));

        chars::MarketInputs in;
        in.market = chars::read_market_csv(files.market);
        in.factors = chars::read_factors_csv(files.factors);
        in.financials = chars::read_financials_csv(files.financials);
        in.ccis = chars::read_ccis_csv(files.ccis);
        CHECK(in.market.size() == 3);
        const auto controls = chars::build_controls(in, {});
        CHECK_FALSE(controls.rows.empty());
        std::size_t with_ret = 0, with_size = 0, with_ccis = 0;
        for (const auto& r : controls.rows) {
            with_ret += r.ret.has_value();
            with_size += r.size.has_value();
            with_ccis += r.ccis.has_value();
        }
        CHECK(with_ret == controls.rows.size());
        CHECK(with_size == controls.rows.size());
        CHECK(with_ccis == controls.rows.size());
    }
}

TEST_CASE("fixed seeds regenerate identical bundles") {
    auto spec = toy_preset(6);
    spec.reviews.n_weeks = 10;
    spec.reviews.exact_total = 200;
    const auto a = write_bundle(scratch_dir("bundle_det_a"), spec);
    const auto b = write_bundle(scratch_dir("bundle_det_b"), spec);
    for (auto member : {&BundleFiles::reviews, &BundleFiles::market, &BundleFiles::factors, &BundleFiles::financials,
                        &BundleFiles::ccis, &BundleFiles::manifest, &BundleFiles::positive}) {
        CHECK(read_file(a.*member) == read_file(b.*member));
    }
    spec.reviews.seed = 7;
    spec.market.seed = 7;
    const auto c = write_bundle(scratch_dir("bundle_det_c"), spec);
    CHECK(read_file(a.reviews) != read_file(c.reviews));
}

TEST_CASE("panel DGP: deterministic, noiseless recovery") {
    DgpSpec d;
    d.n_firms = 30;
    d.n_weeks = 8;
    d.rho = 0.0;
    d.beta = -0.5;
    d.noise_sd = 0.0;
    d.seed = 3;
    const auto p = gen_panel_dgp(d);
    CHECK(p.rows() == 240);
    const auto again = gen_panel_dgp(d);
    CHECK(same_columns(p, again));
    CHECK_FALSE(same_columns(gen_panel_dgp(d, 1), p));

    econ::RegressionSpec s;
    s.outcome = "y";
    s.regressor = "f";
    s.time_effects = econ::TimeEffects::None;
    const auto fit = econ::within_fe_ols(p, s);
    CHECK(std::abs(fit.find("f")->coef + 0.5) < 1e-8);

    d.gamma = {0.3, -0.2};
    const auto with_controls = gen_panel_dgp(d);
    CHECK(with_controls.has("x1"));
    CHECK(with_controls.has("x2"));
    CHECK(with_controls.has("L1.y"));
}

TEST_CASE("one replication summarizes to itself") {
    McSpec spec;
    spec.replications = 1;
    spec.dgp.n_firms = 100;
    spec.threads = 1;
    const auto summary = run_monte_carlo(spec);
    REQUIRE(summary.succeeded == 1);
    const auto single = run_replication(spec, 0);
    CHECK(summary.mean == single.rho_hat);
    CHECK(summary.bias == single.rho_hat - 0.5);
    CHECK(summary.rmse == doctest::Approx(std::abs(single.rho_hat - 0.5)).epsilon(1e-15));
    CHECK(std::isnan(summary.sd));
}

TEST_CASE("Monte Carlo results do not depend on thread count") {
    McSpec spec;
    spec.replications = 6;
    spec.dgp.n_firms = 60;
    spec.threads = 1;
    const auto one = run_monte_carlo(spec);
    spec.threads = 3;
    const auto three = run_monte_carlo(spec);
    REQUIRE(one.reps.size() == three.reps.size());
    for (std::size_t i = 0; i < one.reps.size(); ++i) CHECK(one.reps[i].rho_hat == three.reps[i].rho_hat);
    CHECK(one.mean == three.mean);
}

TEST_CASE("estimator names") {
    CHECK(parse_mc_estimator("gmm") == McEstimator::Gmm);
    CHECK(parse_mc_estimator("fe") == McEstimator::WithinFe);
    CHECK_FALSE(parse_mc_estimator("ols").has_value());
    CHECK(preset("toy", 1).has_value());
    CHECK(preset("table", 1).has_value());
    CHECK_FALSE(preset("huge", 1).has_value());
}
