#include "revpanel/monte_carlo.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "revpanel/csv.hpp"
#include "revpanel/error.hpp"

namespace revpanel::synth {

std::optional<McEstimator> parse_mc_estimator(std::string_view s) {
    if (s == "gmm") return McEstimator::Gmm;
    if (s == "fe") return McEstimator::WithinFe;
    return std::nullopt;
}

std::string_view to_string(McEstimator e) { return e == McEstimator::Gmm ? "gmm" : "fe"; }

econ::RegressionSpec mc_regression(const McSpec& spec) {
    econ::RegressionSpec r;
    r.outcome = "y";
    r.firm_effects = true;
    r.time_effects = econ::TimeEffects::None;
    r.se = econ::SePolicy::ClusteredFirm;
    r.gmm = spec.gmm;
    for (std::size_t j = 0; j < spec.dgp.gamma.size(); ++j) r.controls.push_back(fmt::format("x{}", j + 1));
    if (spec.estimator == McEstimator::Gmm) {
        r.dynamic = true;
        r.lag_depth = 1;
        if (spec.include_feature) r.regressor = "f";
    } else {
        r.regressor = kRhoTerm;
        if (spec.include_feature) r.controls.insert(r.controls.begin(), "f");
    }
    return r;
}

McReplication run_replication(const McSpec& spec, std::size_t rep) {
    McReplication out;
    out.rep = rep;
    try {
        const econ::PanelDataset p = gen_panel_dgp(spec.dgp, rep);
        const econ::FitResult fit = econ::estimate(p, mc_regression(spec));
        const econ::Term* rho = fit.find(kRhoTerm);
        if (!rho) throw Error("lagged outcome term missing from fit");
        out.rho_hat = rho->coef;
        out.rho_se = rho->se;
        out.ar1_p = fit.ar1_p;
        out.ar2_p = fit.ar2_p;
        out.ok = std::isfinite(out.rho_hat);
        if (!out.ok) out.error = "non-finite estimate";
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

McSummary run_monte_carlo(const McSpec& spec) {
    if (spec.replications < 1) throw Error("replications must be at least 1");
    McSummary s;
    s.estimator = spec.estimator;
    s.truth = spec.dgp.rho;
    s.replications = spec.replications;
    s.reps.resize(spec.replications);

    unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, spec.replications));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r; (r = next.fetch_add(1)) < spec.replications;) s.reps[r] = run_replication(spec, r);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double z = spec.level == 0.05 ? 1.959963984540054 : nan;
    double sum = 0.0, sq = 0.0;
    std::size_t rejected = 0, ar1_n = 0, ar1_rej = 0, ar2_n = 0, ar2_rej = 0;
    for (const auto& r : s.reps) {
        if (!r.ok) continue;
        ++s.succeeded;
        sum += r.rho_hat;
        sq += (r.rho_hat - s.truth) * (r.rho_hat - s.truth);
        if (r.rho_se > 0.0) {
            const double t = (r.rho_hat - s.truth) / r.rho_se;
            const double p = std::erfc(std::abs(t) / std::sqrt(2.0));
            if (std::isnan(z) ? p < spec.level : std::abs(t) > z) ++rejected;
        }
        if (r.ar1_p) {
            ++ar1_n;
            ar1_rej += *r.ar1_p < spec.level;
        }
        if (r.ar2_p) {
            ++ar2_n;
            ar2_rej += *r.ar2_p < spec.level;
        }
    }
    if (s.succeeded == 0) {
        s.mean = s.bias = s.rmse = s.sd = s.rejection_rate = nan;
        return s;
    }
    const double n = static_cast<double>(s.succeeded);
    s.mean = sum / n;
    s.bias = s.mean - s.truth;
    s.rmse = std::sqrt(sq / n);
    if (s.succeeded > 1) {
        double v = 0.0;
        for (const auto& r : s.reps)
            if (r.ok) v += (r.rho_hat - s.mean) * (r.rho_hat - s.mean);
        s.sd = std::sqrt(v / (n - 1.0));
    } else {
        s.sd = nan;
    }
    s.rejection_rate = static_cast<double>(rejected) / n;
    if (ar1_n) s.ar1_rejection_rate = static_cast<double>(ar1_rej) / static_cast<double>(ar1_n);
    if (ar2_n) s.ar2_rejection_rate = static_cast<double>(ar2_rej) / static_cast<double>(ar2_n);
    return s;
}

namespace {

std::string num(double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : std::string("NA"); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string("NA"); }

}  // namespace

void write_mc_csv(const std::filesystem::path& path, const McSummary& summary) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    csv::write_row(out, std::vector<std::string>{"rep", "ok", "rho_hat", "rho_se", "ar1_p", "ar2_p", "error"});
    for (const auto& r : summary.reps) {
        csv::write_row(out, std::vector<std::string>{std::to_string(r.rep), r.ok ? "1" : "0",
                                                     r.ok ? num(r.rho_hat) : "NA", r.ok ? num(r.rho_se) : "NA",
                                                     num(r.ar1_p), num(r.ar2_p), r.error});
    }
}

std::string mc_summary_markdown(const McSummary& s, const McSpec& spec) {
    std::string md;
    md += fmt::format("# Monte Carlo: {}\n\n", to_string(s.estimator));
    md += fmt::format("DGP: N={}, T={}, rho={}, beta={}, firm effect sd={}, noise sd={}, seed={}\n\n",
                      spec.dgp.n_firms, spec.dgp.n_weeks, spec.dgp.rho, spec.dgp.beta, spec.dgp.firm_effect_sd,
                      spec.dgp.noise_sd, spec.dgp.seed);
    md += "| statistic | value |\n|---|---|\n";
    md += fmt::format("| replications | {} |\n| succeeded | {} |\n", s.replications, s.succeeded);
    md += fmt::format("| mean rho | {:.6f} |\n| bias | {:.6f} |\n| RMSE | {:.6f} |\n| sd | {:.6f} |\n", s.mean, s.bias,
                      s.rmse, s.sd);
    md += fmt::format("| rejection rate of true rho at {} | {:.4f} |\n", spec.level, s.rejection_rate);
    if (s.ar1_rejection_rate) md += fmt::format("| AR(1) rejection rate | {:.4f} |\n", *s.ar1_rejection_rate);
    if (s.ar2_rejection_rate) md += fmt::format("| AR(2) rejection rate | {:.4f} |\n", *s.ar2_rejection_rate);
    return md;
}

}  // namespace revpanel::synth
