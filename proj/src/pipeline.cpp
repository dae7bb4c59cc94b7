#include "revpanel/pipeline.hpp"

#include <fstream>
#include <set>

#include <Eigen/Core>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "revpanel/characteristics.hpp"
#include "revpanel/csv.hpp"
#include "revpanel/econometrics.hpp"
#include "revpanel/error.hpp"
#include "revpanel/monte_carlo.hpp"
#include "revpanel/panel.hpp"
#include "revpanel/panel_dataset.hpp"
#include "revpanel/sentiment.hpp"
#include "revpanel/synth.hpp"
#include "revpanel/tables.hpp"

namespace revpanel::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    out << text;
}

void require_file(const fs::path& path, std::string_view what) {
    if (!fs::is_regular_file(path)) throw Error(fmt::format("{} not found: {}", what, path.string()));
}

// Records the config echo and digests of everything a stage read and wrote.
class StageRun {
public:
    StageRun(const RunConfig& config, std::string command)
        : config_(config), command_(std::move(command)), dir_(layout_of(config).stage(command_)) {
        fs::create_directories(dir_);
        spdlog::info("{}: writing to {}", command_, dir_.string());
    }

    const fs::path& dir() const { return dir_; }
    void input(const fs::path& p) { inputs_[p.generic_string()] = sha256_file(p); }
    void input_dir(const fs::path& d) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(d))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) input(f);
    }
    void output(const fs::path& p) { outputs_[fs::relative(p, dir_).generic_string()] = sha256_file(p); }

    void finish() {
        const fs::path config_path = dir_ / "config.txt";
        write_text(config_path, config_.serialize());
        json manifest = {{"command", command_},
                         {"version", kVersion},
                         {"libraries",
                          {{"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                                                 EIGEN_MINOR_VERSION)},
                           {"fmt", FMT_VERSION}}},
                         {"config_digest", config_.digest()},
                         {"config", config_.values()},
                         {"inputs", inputs_},
                         {"outputs", outputs_}};
        write_text(dir_ / "manifest.json", manifest.dump(1) + "\n");
        spdlog::info("{}: done ({} outputs)", command_, outputs_.size());
    }

private:
    const RunConfig& config_;
    std::string command_;
    fs::path dir_;
    std::map<std::string, std::string> inputs_, outputs_;
};

ingest::InputFormat input_format(const RunConfig& c, std::string_view key) {
    auto f = ingest::parse_input_format(c.get(key));
    if (!f) throw Error(fmt::format("config key '{}' expects csv or jsonl, got '{}'", key, c.get(key)));
    return *f;
}

Date config_date(const RunConfig& c, std::string_view key) {
    auto d = parse_date(c.get(key));
    if (!d) throw Error(fmt::format("config key '{}' expects yyyy-mm-dd, got '{}'", key, c.get(key)));
    return *d;
}

WeekConvention week_convention(const RunConfig& c) {
    auto w = parse_week_convention(c.get("features.week_convention"));
    if (!w) throw Error(fmt::format("unknown week convention '{}'", c.get("features.week_convention")));
    return *w;
}

int positive_int(const RunConfig& c, std::string_view key) {
    const auto v = c.get_int(key);
    if (v < 1) throw Error(fmt::format("config key '{}' must be at least 1", key));
    return static_cast<int>(v);
}

econ::GmmOptions gmm_options(const RunConfig& c) {
    econ::GmmOptions g;
    g.min_lag = positive_int(c, "gmm.min_lag");
    g.max_lag = positive_int(c, "gmm.max_lag");
    if (g.max_lag < g.min_lag) throw Error("gmm.max_lag must not be below gmm.min_lag");
    g.collapse = c.get_bool("gmm.collapse");
    g.time_dummies = c.get_bool("gmm.time_dummies");
    g.weak_instrument_f = c.get_double("gmm.weak_instrument_f");
    return g;
}

econ::TimeEffects time_effects(const RunConfig& c) {
    auto t = econ::parse_time_effects(c.get("regress.time_effects"));
    if (!t) throw Error(fmt::format("unknown time effects '{}'", c.get("regress.time_effects")));
    return *t;
}

econ::SePolicy se_policy(const RunConfig& c) {
    auto s = econ::parse_se_policy(c.get("regress.se"));
    if (!s) throw Error(fmt::format("unknown standard error policy '{}'", c.get("regress.se")));
    return *s;
}

chars::CharacteristicsOptions characteristics_options(const RunConfig& c) {
    chars::CharacteristicsOptions o;
    o.convention = week_convention(c);
    o.beta_window = static_cast<std::size_t>(positive_int(c, "controls.beta_window"));
    o.beta_min_obs = static_cast<std::size_t>(positive_int(c, "controls.beta_min_obs"));
    o.illiq_scale = c.get_double("controls.illiq_scale");
    o.surprise = {positive_int(c, "controls.surprise_window"), positive_int(c, "controls.surprise_min")};
    o.vol = {positive_int(c, "controls.vol_window"), positive_int(c, "controls.vol_min")};
    o.surprise_clamp = c.get_optional_double("controls.surprise_clamp");
    o.publication_lag_weeks = static_cast<int>(c.get_int("controls.publication_lag_weeks"));
    return o;
}

econ::PanelDataset load_panel(const Layout& layout, StageRun& run) {
    require_file(layout.panel(), "panel file");
    run.input(layout.panel());
    return econ::read_panel_csv(layout.panel());
}

}  // namespace

Layout layout_of(const RunConfig& config) { return Layout{config.get("out_dir")}; }

std::vector<SummaryRow> summarize(const std::vector<ingest::ReviewRecord>& records) {
    struct Acc {
        std::size_t reviews = 0;
        std::set<std::pair<std::string, std::string>> products;
        std::set<std::string> firms;
        void add(const ingest::ReviewRecord& r) {
            ++reviews;
            products.emplace(r.firm_id, r.product_id);
            firms.insert(r.firm_id);
        }
    };
    Acc all;
    std::map<std::string, Acc> sectors;
    for (const auto& r : records) {
        all.add(r);
        if (r.sector && !r.sector->empty()) sectors[*r.sector].add(r);
    }
    std::vector<SummaryRow> out = {{"all", all.reviews, all.products.size(), all.firms.size()}};
    for (const auto& [name, acc] : sectors) out.push_back({name, acc.reviews, acc.products.size(), acc.firms.size()});
    return out;
}

void cmd_ingest(const RunConfig& config) {
    StageRun run(config, "ingest");
    const auto paths_text = config.get_list("input.reviews");
    if (paths_text.empty()) throw Error("config key 'input.reviews' lists no review dumps");
    std::vector<fs::path> paths(paths_text.begin(), paths_text.end());
    for (const auto& p : paths) {
        require_file(p, "review dump");
        run.input(p);
    }
    ingest::IngestOptions options;
    options.format = input_format(config, "input.format");
    options.window_start = config_date(config, "sample.start");
    options.window_end = config_date(config, "sample.end");
    const auto result = ingest::ingest_files(paths, options);

    const Layout layout = layout_of(config);
    fs::remove_all(layout.clean_store());
    for (const auto& p : ingest::write_clean_store(layout.clean_store(), result.records)) run.output(p);
    ingest::write_report_json(layout.ingest_report(), result.report);
    run.output(layout.ingest_report());
    spdlog::info("ingest: read {}, kept {}, duplicates {}, invalid {}", result.report.records_read,
                 result.report.records_kept, result.report.duplicates_dropped, result.report.invalid_dropped);
    run.finish();
}

void cmd_summary(const RunConfig& config) {
    const Layout layout = layout_of(config);
    const auto records = ingest::read_clean_store(layout.clean_store());
    StageRun run(config, "summary");
    run.input_dir(layout.clean_store());
    const auto rows = summarize(records);

    const fs::path csv_path = run.dir() / "summary.csv";
    {
        std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
        csv::write_row(out, {"group", "reviews", "products", "firms"});
        for (const auto& r : rows)
            csv::write_row(out, {r.group, std::to_string(r.reviews), std::to_string(r.products), std::to_string(r.firms)});
    }
    std::string md = "# Review summary\n\n| Group | Reviews | Products | Firms |\n|---|---:|---:|---:|\n";
    for (const auto& r : rows) md += fmt::format("| {} | {} | {} | {} |\n", r.group, r.reviews, r.products, r.firms);
    write_text(run.dir() / "summary.md", md);
    run.output(csv_path);
    run.output(run.dir() / "summary.md");
    run.finish();
}

void cmd_features(const RunConfig& config) {
    const Layout layout = layout_of(config);
    const auto records = ingest::read_clean_store(layout.clean_store());
    const fs::path pos = config.get_path("input.lexicon_positive");
    const fs::path neg = config.get_path("input.lexicon_negative");
    require_file(pos, "lexicon file");
    require_file(neg, "lexicon file");
    StageRun run(config, "features");
    run.input_dir(layout.clean_store());
    run.input(pos);
    run.input(neg);

    const auto lexicon = sentiment::load_lexicon(pos, neg);
    const auto classified = panel::classify_reviews(records, lexicon);
    auto rows = panel::aggregate_firm_week(classified, week_convention(config));
    rows = panel::accumulate_window(rows, positive_int(config, "features.window_weeks"));
    panel::compute_diffs(rows);

    panel::EligibilityThresholds thresholds;
    thresholds.min_reviews = config.get_uint("eligibility.min_reviews");
    thresholds.min_span_days = static_cast<int>(config.get_int("eligibility.min_span_days"));
    const auto activity = panel::firm_activity(records);
    const auto eligible = panel::filter_eligible(activity, thresholds);
    rows = panel::restrict_to(rows, eligible.eligible_firms);
    spdlog::info("features: {} eligible of {} firms, {} firm-weeks", eligible.eligible_firms.size(), activity.size(),
                 rows.size());

    panel::write_features_csv(layout.features(), rows);
    panel::write_eligibility_csv(layout.eligibility(), eligible, activity);
    run.output(layout.features());
    run.output(layout.eligibility());
    run.finish();
}

void cmd_panel(const RunConfig& config) {
    const Layout layout = layout_of(config);
    require_file(layout.features(), "features file");
    const fs::path market = config.get_path("input.market");
    const fs::path factors = config.get_path("input.factors");
    const fs::path financials = config.get_path("input.financials");
    const fs::path ccis = config.get_path("input.ccis");
    for (const auto& p : {market, factors, financials, ccis}) require_file(p, "input file");
    StageRun run(config, "panel");
    for (const auto& p : {layout.features(), market, factors, financials, ccis}) run.input(p);

    const auto features = panel::read_features_csv(layout.features());
    chars::MarketInputs inputs;
    inputs.market = chars::read_market_csv(market);
    inputs.factors = chars::read_factors_csv(factors);
    inputs.financials = chars::read_financials_csv(financials);
    inputs.ccis = chars::read_ccis_csv(ccis);
    const auto controls = chars::build_controls(inputs, characteristics_options(config));

    std::set<std::string> firms;
    for (const auto& r : features) firms.insert(r.firm_id);
    const auto dataset = econ::assemble_panel(features, controls.rows, firms);
    spdlog::info("panel: {} firms, {} rows", dataset.firm_ids.size(), dataset.rows());

    chars::write_controls_csv(layout.controls(), controls.rows);
    econ::write_panel_csv(layout.panel(), dataset);
    run.output(layout.controls());
    run.output(layout.panel());
    run.finish();
}

void cmd_regress(const RunConfig& config) {
    const Layout layout = layout_of(config);
    require_file(layout.panel(), "panel file");
    StageRun run(config, "regress");
    const auto dataset = load_panel(layout, run);

    econ::RegressionSpec spec;
    spec.outcome = config.get("regress.outcome");
    spec.regressor = config.get("regress.regressor");
    spec.controls = config.get_list("regress.controls");
    spec.firm_effects = config.get_bool("regress.firm_effects");
    spec.time_effects = time_effects(config);
    spec.dynamic = config.get_bool("regress.dynamic");
    spec.lag_depth = positive_int(config, "regress.lag_depth");
    spec.lagged_controls = config.get_bool("regress.lagged_controls");
    spec.gmm = gmm_options(config);
    spec.se = se_policy(config);

    const auto fit = econ::estimate(dataset, spec);
    const auto table = econ::single_fit_table(fit, spec.dynamic ? "dynamic" : "static");
    write_text(run.dir() / "regress.csv", econ::table_csv(table));
    write_text(run.dir() / "regress.md", econ::tables_markdown({table}));
    run.output(run.dir() / "regress.csv");
    run.output(run.dir() / "regress.md");
    run.finish();
}

void cmd_tables(const RunConfig& config) {
    const Layout layout = layout_of(config);
    require_file(layout.panel(), "panel file");
    StageRun run(config, "tables");
    const auto dataset = load_panel(layout, run);

    std::vector<std::string> names = config.get_list("tables.names");
    if (names.size() == 1 && names.front() == "all") names = econ::table_names();
    for (const auto& n : names) {
        if (std::find(econ::table_names().begin(), econ::table_names().end(), n) == econ::table_names().end())
            throw Error(fmt::format("unknown table '{}'", n));
    }
    econ::TableOptions options;
    options.controls = config.get_list("regress.controls");
    options.time_effects = time_effects(config);
    options.static_se = se_policy(config);
    options.gmm = gmm_options(config);

    std::vector<econ::TableResult> results;
    for (const auto& n : names) {
        results.push_back(econ::run_table(dataset, n, options));
        const fs::path p = run.dir() / (n + ".csv");
        write_text(p, econ::table_csv(results.back()));
        run.output(p);
        for (const auto& cell : results.back().cells)
            if (!cell.error.empty()) spdlog::warn("tables: {} / {}: {}", n, cell.label, cell.error);
    }
    write_text(run.dir() / "tables.md", econ::tables_markdown(results));
    run.output(run.dir() / "tables.md");
    run.finish();
}

std::string bundle_config(const fs::path& dir, ingest::InputFormat format, std::uint64_t seed) {
    const auto f = synth::bundle_files(dir, format);
    std::string out = "# Runs the pipeline on this synthetic bundle\n";
    out += fmt::format("seed={}\n", seed);
    out += fmt::format("input.reviews={}\n", f.reviews.generic_string());
    out += fmt::format("input.format={}\n", format == ingest::InputFormat::Csv ? "csv" : "jsonl");
    out += fmt::format("input.lexicon_positive={}\n", f.positive.generic_string());
    out += fmt::format("input.lexicon_negative={}\n", f.negative.generic_string());
    out += fmt::format("input.market={}\n", f.market.generic_string());
    out += fmt::format("input.factors={}\n", f.factors.generic_string());
    out += fmt::format("input.financials={}\n", f.financials.generic_string());
    out += fmt::format("input.ccis={}\n", f.ccis.generic_string());
    return out;
}

void cmd_synth(const RunConfig& config) {
    StageRun run(config, "synth");
    const std::uint64_t seed = config.get_uint("seed");
    auto spec = synth::preset(config.get("synth.preset"), seed);
    if (!spec) throw Error(fmt::format("unknown synthetic preset '{}'", config.get("synth.preset")));
    spec->format = input_format(config, "synth.format");
    const fs::path bundle = run.dir() / "bundle";
    const auto files = synth::write_bundle(bundle, *spec);
    write_text(run.dir() / "bundle.conf", bundle_config(bundle, spec->format, seed));
    for (const auto& p : {files.reviews, files.market, files.factors, files.financials, files.ccis, files.manifest,
                          files.positive, files.negative, run.dir() / "bundle.conf"})
        run.output(p);
    run.finish();
}

void cmd_mc(const RunConfig& config) {
    StageRun run(config, "mc");
    synth::McSpec spec;
    auto est = synth::parse_mc_estimator(config.get("mc.estimator"));
    if (!est) throw Error(fmt::format("unknown estimator '{}' (expected gmm or fe)", config.get("mc.estimator")));
    spec.estimator = *est;
    spec.replications = config.get_uint("mc.replications");
    spec.dgp.n_firms = config.get_uint("mc.n_firms");
    spec.dgp.n_weeks = config.get_uint("mc.n_weeks");
    spec.dgp.rho = config.get_double("mc.rho");
    spec.dgp.beta = config.get_double("mc.beta");
    for (const auto& g : config.get_list("mc.gamma")) {
        auto v = csv::parse_optional_double(g);
        if (!v) throw Error(fmt::format("mc.gamma entry '{}' is not a number", g));
        spec.dgp.gamma.push_back(*v);
    }
    spec.dgp.firm_effect_sd = config.get_double("mc.firm_effect_sd");
    spec.dgp.time_effect_sd = config.get_double("mc.time_effect_sd");
    spec.dgp.noise_sd = config.get_double("mc.noise_sd");
    spec.dgp.feature_rho = config.get_double("mc.feature_rho");
    spec.dgp.error_ar1 = config.get_double("mc.error_ar1");
    spec.dgp.burn_in = config.get_uint("mc.burn_in");
    spec.dgp.seed = config.get_uint("seed");
    for (double sd : {spec.dgp.firm_effect_sd, spec.dgp.time_effect_sd, spec.dgp.noise_sd})
        if (sd < 0.0) throw Error("DGP standard deviations must be non-negative");
    spec.gmm = gmm_options(config);
    spec.threads = static_cast<unsigned>(config.get_uint("mc.threads"));
    spec.level = config.get_double("mc.level");

    const auto summary = synth::run_monte_carlo(spec);
    const std::size_t failed = summary.replications - summary.succeeded;
    if (failed) spdlog::warn("mc: {} of {} replications failed", failed, summary.replications);
    synth::write_mc_csv(run.dir() / "replications.csv", summary);
    write_text(run.dir() / "summary.md", synth::mc_summary_markdown(summary, spec));
    run.output(run.dir() / "replications.csv");
    run.output(run.dir() / "summary.md");
    run.finish();
}

void cmd_all(const RunConfig& config) {
    cmd_ingest(config);
    cmd_summary(config);
    cmd_features(config);
    cmd_panel(config);
    cmd_tables(config);
}

}  // namespace revpanel::cli
