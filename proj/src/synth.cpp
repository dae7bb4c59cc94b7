#include "revpanel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "revpanel/csv.hpp"
#include "revpanel/error.hpp"
#include "revpanel/rng.hpp"

namespace revpanel::synth {

namespace {

using nlohmann::json;

constexpr std::array<std::array<double, 5>, 3> kStarProbs = {{
    {0.55, 0.25, 0.12, 0.05, 0.03},  // negative
    {0.02, 0.03, 0.10, 0.35, 0.50},  // positive
    {0.10, 0.15, 0.50, 0.15, 0.10},  // neutral
}};

std::string vary_case(std::string term, Rng& rng) {
    const bool ascii = std::all_of(term.begin(), term.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
    if (!ascii) return term;
    switch (rng.below(3)) {
        case 0:
            for (auto& c : term) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            break;
        case 1:
            term[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(term[0])));
            break;
        default: break;
    }
    return term;
}

// Review text with exactly `nw` negative and `pw` positive lexicon matches.
std::string make_text(int nw, int pw, Rng& rng) {
    const auto& lex = demo_lexicon();
    std::vector<std::string> tokens;
    for (int i = 0; i < nw; ++i) tokens.push_back(vary_case(lex.negative[rng.below(lex.negative.size())], rng));
    for (int i = 0; i < pw; ++i) tokens.push_back(vary_case(lex.positive[rng.below(lex.positive.size())], rng));
    const int fillers = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < fillers; ++i) tokens.push_back(lex.filler[rng.below(lex.filler.size())]);
    for (std::size_t i = tokens.size(); i > 1; --i) std::swap(tokens[i - 1], tokens[rng.below(i)]);
    std::string text;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) text += lex.separator;
        text += tokens[i];
    }
    return text;
}

std::pair<int, int> term_counts(int polarity_class, Rng& rng) {
    switch (polarity_class) {
        case 0: {
            int nw = 1 + static_cast<int>(rng.below(2));
            return {nw, static_cast<int>(rng.below(static_cast<std::uint64_t>(nw)))};
        }
        case 1: {
            int pw = 1 + static_cast<int>(rng.below(2));
            return {static_cast<int>(rng.below(static_cast<std::uint64_t>(pw))), pw};
        }
        default: {
            int k = static_cast<int>(rng.below(2));
            return {k, k};
        }
    }
}

std::string firm_label(int i) { return fmt::format("F{:03d}", i + 1); }

}  // namespace

const DemoLexicon& demo_lexicon() {
    static const DemoLexicon lex = {
        {"好评", "满意", "不错", "推荐", "物流快", "great", "good", "very good", "excellent"},
        {"差评", "不满意", "质量差", "失望", "退货", "bad", "broken", "very bad", "terrible"},
        {"包装", "收到了", "颜色", "尺寸", "客服", "价格", "发货", "this phone", "the box", "arrived today"},
        "，"};
    return lex;
}

ReviewCorpus gen_reviews(const ReviewSpec& spec) {
    if (spec.n_firms < 1 || spec.n_weeks < 1) throw Error("review spec needs at least one firm and one week");
    Rng rng(spec.seed, 0x5245564945575300ULL);  // "REVIEWS"
    const WeekIndex first = assign_week(spec.start);
    const std::size_t n_cells = static_cast<std::size_t>(spec.n_firms) * static_cast<std::size_t>(spec.n_weeks) * 3;

    // counts[(firm * n_weeks + week) * 3 + class]
    std::vector<std::uint32_t> counts(n_cells, 0);
    if (spec.exact_total) {
        std::vector<double> weights(n_cells);
        for (std::size_t c = 0; c < n_cells; ++c) weights[c] = spec.rates[c % 3];
        std::vector<double> cumulative(n_cells);
        double acc = 0.0;
        for (std::size_t c = 0; c < n_cells; ++c) cumulative[c] = (acc += weights[c]);
        for (std::size_t r = 0; r < *spec.exact_total; ++r) {
            const double u = rng.uniform() * acc;
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            ++counts[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), n_cells - 1)];
        }
    } else {
        for (std::size_t c = 0; c < n_cells; ++c) counts[c] = static_cast<std::uint32_t>(rng.poisson(spec.rates[c % 3]));
    }

    ReviewCorpus corpus;
    std::vector<ingest::RawReview> originals;
    std::uint64_t reviewer = 0;
    for (int f = 0; f < spec.n_firms; ++f) {
        const std::string firm = firm_label(f);
        corpus.firm_ids.push_back(firm);
        for (int w = 0; w < spec.n_weeks; ++w) {
            const WeekIndex week = WeekIndex::from_ordinal(first.ordinal() + w);
            WeekTruth truth;
            truth.firm_id = firm;
            truth.week = week;
            for (int cls = 0; cls < 3; ++cls) {
                const std::size_t cell = (static_cast<std::size_t>(f) * static_cast<std::size_t>(spec.n_weeks) + static_cast<std::size_t>(w)) * 3 + static_cast<std::size_t>(cls);
                for (std::uint32_t k = 0; k < counts[cell]; ++k) {
                    ingest::RawReview r;
                    r.firm_id = firm;
                    r.product_id = fmt::format("{}-P{:03d}", firm, rng.below(static_cast<std::uint64_t>(spec.products_per_firm)) + 1);
                    r.reviewer_id = fmt::format("U{:07d}", ++reviewer);
                    r.date = week.monday() + std::chrono::days(static_cast<int>(rng.below(7)));
                    auto [nw, pw] = term_counts(cls, rng);
                    r.text = make_text(nw, pw, rng);
                    r.stars = 1 + static_cast<int>(rng.categorical(kStarProbs[static_cast<std::size_t>(cls)]));
                    if (rng.uniform() < 0.8) r.order_to_review_days = static_cast<int>(rng.below(31));
                    if (!spec.sectors.empty()) r.sector = spec.sectors[static_cast<std::size_t>(f) % spec.sectors.size()];
                    ++truth.n_reviews;
                    if (cls == 0) ++truth.n_neg;
                    if (cls == 1) ++truth.n_pos;
                    ++truth.stars[static_cast<std::size_t>(r.stars - 1)];
                    originals.push_back(std::move(r));
                }
            }
            if (truth.n_reviews > 0) corpus.truth.push_back(truth);
        }
    }
    // File order: by date, ties in generation order.
    std::stable_sort(originals.begin(), originals.end(),
                     [](const ingest::RawReview& a, const ingest::RawReview& b) { return a.date < b.date; });

    // Planted duplicates: copies of distinct originals placed after them.
    const std::size_t n = originals.size();
    const std::size_t dups = std::min(spec.planted_duplicates, n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < dups; ++i) std::swap(order[i], order[i + rng.below(n - i)]);
    std::vector<std::pair<std::uint64_t, std::size_t>> placement;  // (sort key, index into pool)
    std::vector<ingest::RawReview> pool = originals;
    for (std::size_t i = 0; i < n; ++i) placement.emplace_back(2 * i, i);
    for (std::size_t d = 0; d < dups; ++d) {
        const std::size_t src = order[d];
        const std::uint64_t slot = src + rng.below(n - src);  // after the original
        placement.emplace_back(2 * slot + 1, pool.size());
        pool.push_back(originals[src]);
    }
    std::stable_sort(placement.begin(), placement.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [key, idx] : placement) corpus.rows.push_back(pool[idx]);
    corpus.duplicates = dups;
    return corpus;
}

void write_review_dump(const std::filesystem::path& path, const std::vector<ingest::RawReview>& rows,
                       ingest::InputFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    const bool with_sector = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.sector.has_value(); });
    if (format == ingest::InputFormat::Csv) {
        std::vector<std::string> header = {"firm_id", "product_id", "reviewer_id", "date", "stars", "text", "order_to_review_days"};
        if (with_sector) header.push_back("sector");
        csv::write_row(out, header);
        for (const auto& r : rows) {
            std::vector<std::string> f = {r.firm_id, r.product_id, r.reviewer_id, format_date(r.date), std::to_string(r.stars), r.text,
                                          r.order_to_review_days ? std::to_string(*r.order_to_review_days) : ""};
            if (with_sector) f.push_back(r.sector.value_or(""));
            csv::write_row(out, f);
        }
        return;
    }
    for (const auto& r : rows) {
        json j = {{"firm_id", r.firm_id}, {"product_id", r.product_id}, {"reviewer_id", r.reviewer_id},
                  {"date", format_date(r.date)}, {"stars", r.stars}, {"text", r.text}};
        if (r.order_to_review_days) j["order_to_review_days"] = *r.order_to_review_days;
        if (r.sector) j["sector"] = *r.sector;
        out << j.dump() << '\n';
    }
}

chars::MarketInputs gen_market(const ReviewSpec& reviews, const ReviewCorpus& corpus, const MarketSpec& spec) {
    Rng rng(spec.seed, 0x4D41524B45540000ULL);  // "MARKET"
    chars::MarketInputs out;
    const WeekIndex first_review = assign_week(reviews.start);
    const std::int64_t w_begin = first_review.ordinal() - spec.pre_weeks;
    const std::int64_t w_end = first_review.ordinal() + reviews.n_weeks;  // one week past the reviews

    std::vector<Date> days;
    for (std::int64_t w = w_begin; w <= w_end; ++w) {
        const Date monday = WeekIndex::from_ordinal(w).monday();
        for (int d = 0; d < 5; ++d) days.push_back(monday + std::chrono::days(d));
    }
    for (Date d : days) {
        chars::FactorDay f;
        f.date = d;
        f.mkt = rng.normal(0.0004, 0.012);
        f.smb = rng.normal(0.0, 0.005);
        f.hml = rng.normal(0.0, 0.005);
        f.umd = rng.normal(0.0, 0.005);
        out.factors.push_back(f);
    }

    // Truth counts by firm and week.
    std::map<std::pair<std::string, std::int64_t>, const WeekTruth*> truth;
    for (const auto& t : corpus.truth) truth[{t.firm_id, t.week.ordinal()}] = &t;
    auto diff = [&](const std::string& firm, std::int64_t w, bool neg) -> std::optional<double> {
        auto cur = truth.find({firm, w});
        auto prev = truth.find({firm, w - 1});
        if (cur == truth.end() || prev == truth.end()) return std::nullopt;
        return neg ? double(cur->second->n_neg) - double(prev->second->n_neg)
                   : double(cur->second->n_pos) - double(prev->second->n_pos);
    };

    for (const auto& firm : corpus.firm_ids) {
        const double b = rng.normal(1.0, 0.2);
        const double s = rng.normal(0.0, 0.3);
        const double h = rng.normal(0.0, 0.3);
        double cap = std::exp(rng.normal(22.5, 0.5));
        auto& bars = out.market[firm];
        std::size_t day = 0;
        for (std::int64_t w = w_begin; w <= w_end; ++w) {
            double target = spec.mu + rng.normal(0.0, spec.weekly_noise_sd);
            if (auto c = diff(firm, w - 1, true)) target += spec.beta_neg * *c;
            if (auto c = diff(firm, w - 1, false)) target += spec.beta_pos * *c;
            std::array<double, 5> r{};
            for (int d = 0; d < 5; ++d) {
                const auto& f = out.factors[day + static_cast<std::size_t>(d)];
                r[static_cast<std::size_t>(d)] = b * f.mkt + s * f.smb + h * f.hml + rng.normal(0.0, spec.daily_noise_sd);
            }
            // Common daily drift so the week compounds exactly to target.
            const double goal = std::log1p(target);
            double delta = 0.0;
            for (int it = 0; it < 60; ++it) {
                double fv = -goal, fp = 0.0;
                for (double x : r) {
                    fv += std::log1p(x + delta);
                    fp += 1.0 / (1.0 + x + delta);
                }
                const double step = fv / fp;
                delta -= step;
                if (std::abs(step) < 1e-17) break;
            }
            for (int d = 0; d < 5; ++d) {
                chars::DailyBar bar;
                bar.date = days[day + static_cast<std::size_t>(d)];
                bar.ret = r[static_cast<std::size_t>(d)] + delta;
                cap *= 1.0 + bar.ret;
                bar.tradable_cap = cap;
                bar.volume = std::exp(rng.normal(18.0, 0.3));
                bar.turnover = std::exp(rng.normal(-4.5, 0.3));
                bars.push_back(bar);
            }
            day += 5;
        }
    }

    // Quarterly financials.
    const Quarter q_first{first_review.year - spec.history_years, 1};
    const Quarter q_last = quarter_of(days.back());
    for (const auto& firm : corpus.firm_ids) {
        double ta = std::exp(rng.normal(22.0, 0.5));
        double roa = 0.005;
        double rps = std::exp(rng.normal(0.7, 0.2));
        const bool usually_pays = rng.uniform() < 0.7;
        auto& fin = out.financials[firm];
        for (std::int64_t t = q_first.ordinal(); t <= q_last.ordinal(); ++t) {
            chars::QuarterlyFinancials q;
            q.quarter = Quarter::from_ordinal(t);
            ta *= std::max(0.5, 1.0 + rng.normal(0.02, 0.03));
            roa = 0.005 + 0.6 * (roa - 0.005) + rng.normal(0.0, 0.004);
            rps *= std::max(0.5, 1.0 + rng.normal(0.02, 0.05));
            const double ni = roa * ta;
            const double cfo = ni + rng.normal(0.0, 0.003) * ta;
            q.total_assets = ta;
            q.net_profit = ni;
            q.cfo = cfo;
            q.accruals = ni - cfo;
            q.operating_profit = 1.2 * ni + rng.normal(0.0, 0.001) * ta;
            q.revenue_per_share = rps;
            const double revenue = 0.25 * ta * std::exp(rng.normal(0.0, 0.1));
            q.operating_revenue = revenue;
            q.sales_expense = 0.08 * revenue * std::exp(rng.normal(0.0, 0.1));
            q.rd_expense = 0.03 * revenue * std::exp(rng.normal(0.0, 0.2));
            const double book = 0.45 * ta * std::exp(rng.normal(0.0, 0.05));
            q.book_equity = book;
            q.book_value = book;
            q.market_value = book / (0.5 * std::exp(rng.normal(0.0, 0.2)));
            const bool pays = usually_pays ? rng.uniform() < 0.9 : rng.uniform() < 0.2;
            q.pays_dividend = pays;
            q.dividends = pays ? book * (0.005 + 0.025 * rng.uniform()) : 0.0;
            q.pre_extraordinary_income = 1.05 * ni + rng.normal(0.0, 0.001) * ta;
            fin.emplace(t, q);
        }
    }

    // Monthly confidence index.
    const auto ymd_first = std::chrono::year_month_day(days.front());
    const auto ymd_last = std::chrono::year_month_day(days.back());
    int y = static_cast<int>(ymd_first.year());
    int m = static_cast<int>(static_cast<unsigned>(ymd_first.month()));
    double level = 0.0;
    while (std::tie(y, m) <= std::make_tuple(static_cast<int>(ymd_last.year()),
                                             static_cast<int>(static_cast<unsigned>(ymd_last.month())))) {
        level = 0.8 * level + rng.normal(0.0, 2.0);
        out.ccis.push_back({Month{y, m}, 107.93 + level});
        if (++m == 13) {
            m = 1;
            ++y;
        }
    }
    return out;
}

BundleSpec toy_preset(std::uint64_t seed) {
    BundleSpec b;
    b.reviews.n_firms = 3;
    b.reviews.start = *parse_date("2015-01-05");
    b.reviews.n_weeks = 60;
    b.reviews.exact_total = 1980;
    b.reviews.planted_duplicates = 20;
    b.reviews.sectors = {"home appliances", "garments", "electronics"};
    b.reviews.seed = seed;
    b.market.seed = seed;
    return b;
}

BundleSpec table_preset(std::uint64_t seed) {
    BundleSpec b;
    b.reviews.n_firms = 100;
    b.reviews.start = *parse_date("2014-01-06");
    b.reviews.n_weeks = 150;
    b.reviews.rates = {6.0, 6.0, 4.0};
    b.reviews.planted_duplicates = 50;
    b.reviews.sectors = {"home appliances", "garments", "electronics", "food"};
    b.reviews.seed = seed;
    b.market.seed = seed;
    b.market.beta_neg = -0.001;
    b.market.beta_pos = 0.0;
    return b;
}

std::optional<BundleSpec> preset(std::string_view name, std::uint64_t seed) {
    if (name == "toy") return toy_preset(seed);
    if (name == "table") return table_preset(seed);
    return std::nullopt;
}

BundleFiles bundle_files(const std::filesystem::path& dir, ingest::InputFormat format) {
    BundleFiles f;
    f.reviews = dir / (format == ingest::InputFormat::Csv ? "reviews.csv" : "reviews.jsonl");
    f.market = dir / "market.csv";
    f.factors = dir / "factors.csv";
    f.financials = dir / "financials.csv";
    f.ccis = dir / "ccis.csv";
    f.manifest = dir / "manifest.json";
    f.positive = dir / "lexicon" / "positive.txt";
    f.negative = dir / "lexicon" / "negative.txt";
    return f;
}

BundleFiles write_bundle(const std::filesystem::path& dir, const BundleSpec& spec) {
    std::filesystem::create_directories(dir / "lexicon");
    const BundleFiles files = bundle_files(dir, spec.format);
    const ReviewCorpus corpus = gen_reviews(spec.reviews);
    const chars::MarketInputs market = gen_market(spec.reviews, corpus, spec.market);

    write_review_dump(files.reviews, corpus.rows, spec.format);
    chars::write_market_csv(files.market, market.market);
    chars::write_factors_csv(files.factors, market.factors);
    chars::write_financials_csv(files.financials, market.financials);
    chars::write_ccis_csv(files.ccis, market.ccis);
    auto write_terms = [](const std::filesystem::path& p, const std::vector<std::string>& terms) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(fmt::format("cannot write {}", p.string()));
        out << "# demonstration lexicon, one term per line\n";
        for (const auto& t : terms) out << t << '\n';
    };
    write_terms(files.positive, demo_lexicon().positive);
    write_terms(files.negative, demo_lexicon().negative);

    json truth = json::array();
    std::map<std::string, std::size_t> per_firm;
    for (const auto& t : corpus.truth) {
        truth.push_back({{"firm_id", t.firm_id}, {"iso_year", t.week.year}, {"iso_week", t.week.week},
                         {"n_reviews", t.n_reviews}, {"n_neg", t.n_neg}, {"n_pos", t.n_pos},
                         {"stars", t.stars}});
        per_firm[t.firm_id] += t.n_reviews;
    }
    std::map<std::string, int> products;
    {
        std::map<std::string, std::set<std::string>> seen;
        for (const auto& r : corpus.rows) seen[r.firm_id].insert(r.product_id);
        for (const auto& [f, s] : seen) products[f] = static_cast<int>(s.size());
    }
    const auto& rs = spec.reviews;
    json manifest = {
        {"reviews",
         {{"seed", rs.seed}, {"n_firms", rs.n_firms}, {"start", format_date(rs.start)}, {"n_weeks", rs.n_weeks},
          {"rates", rs.rates}, {"exact_total", rs.exact_total ? json(*rs.exact_total) : json(nullptr)},
          {"products_per_firm", rs.products_per_firm}, {"planted_duplicates", rs.planted_duplicates},
          {"sectors", rs.sectors}}},
        {"market",
         {{"seed", spec.market.seed}, {"pre_weeks", spec.market.pre_weeks}, {"mu", spec.market.mu},
          {"beta_neg", spec.market.beta_neg}, {"beta_pos", spec.market.beta_pos},
          {"weekly_noise_sd", spec.market.weekly_noise_sd}, {"daily_noise_sd", spec.market.daily_noise_sd},
          {"history_years", spec.market.history_years}}},
        {"counts",
         {{"rows", corpus.rows.size()}, {"duplicates", corpus.duplicates},
          {"kept", corpus.rows.size() - corpus.duplicates}, {"firms", corpus.firm_ids.size()},
          {"per_firm", per_firm}, {"products_per_firm_observed", products}}},
        {"files",
         {{"reviews", files.reviews.filename().string()}, {"market", "market.csv"}, {"factors", "factors.csv"},
          {"financials", "financials.csv"}, {"ccis", "ccis.csv"}, {"positive", "lexicon/positive.txt"},
          {"negative", "lexicon/negative.txt"}}},
        {"truth", truth}};
    std::ofstream out(files.manifest, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", files.manifest.string()));
    out << manifest.dump(1) << '\n';
    return files;
}

std::vector<WeekTruth> read_manifest_truth(const std::filesystem::path& manifest) {
    std::ifstream in(manifest, std::ios::binary);
    if (!in) throw Error(fmt::format("manifest not found: {}", manifest.string()));
    json j = json::parse(in);
    std::vector<WeekTruth> out;
    for (const auto& t : j.at("truth")) {
        WeekTruth w;
        w.firm_id = t.at("firm_id").get<std::string>();
        w.week = WeekIndex{t.at("iso_year").get<int>(), t.at("iso_week").get<int>()};
        w.n_reviews = t.at("n_reviews").get<std::uint32_t>();
        w.n_neg = t.at("n_neg").get<std::uint32_t>();
        w.n_pos = t.at("n_pos").get<std::uint32_t>();
        w.stars = t.at("stars").get<std::array<std::uint32_t, 5>>();
        out.push_back(w);
    }
    return out;
}

econ::PanelDataset gen_panel_dgp(const DgpSpec& spec, std::uint64_t stream) {
    Rng rng(spec.seed, stream);
    const std::size_t total = spec.burn_in + spec.n_weeks;
    const std::size_t k = spec.gamma.size();
    std::vector<double> lambda(total);
    for (auto& l : lambda) l = rng.normal(0.0, spec.time_effect_sd);
    const double innov = std::sqrt(std::max(0.0, 1.0 - spec.feature_rho * spec.feature_rho)) * spec.feature_sd;

    std::vector<std::string> firms;
    std::vector<std::int64_t> time;
    std::vector<int> year;
    std::vector<double> y_out, f_out;
    std::vector<std::vector<double>> x_out(k);
    for (std::size_t i = 0; i < spec.n_firms; ++i) {
        const double eta = rng.normal(0.0, spec.firm_effect_sd);
        double y = std::abs(spec.rho) < 1.0 ? eta / (1.0 - spec.rho) : 0.0;
        double f = rng.normal(0.0, spec.feature_sd);
        std::vector<double> x(k);
        for (auto& v : x) v = rng.normal(0.0, spec.feature_sd);
        double e1 = 0.0, e2 = 0.0;
        for (std::size_t t = 0; t < total; ++t) {
            f = spec.feature_rho * f + innov * rng.normal();
            double gx = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                x[j] = spec.feature_rho * x[j] + innov * rng.normal();
                gx += spec.gamma[j] * x[j];
            }
            const double e = spec.error_ar1 * e1 + spec.error_ar2 * e2 + rng.normal(0.0, spec.noise_sd);
            e2 = e1;
            e1 = e;
            y = spec.rho * y + spec.beta * f + gx + eta + lambda[t] + e;
            if (t < spec.burn_in) continue;
            firms.push_back(fmt::format("f{:04d}", i + 1));
            time.push_back(static_cast<std::int64_t>(t - spec.burn_in + 1));
            year.push_back(2000);
            y_out.push_back(y);
            f_out.push_back(f);
            for (std::size_t j = 0; j < k; ++j) x_out[j].push_back(x[j]);
        }
    }
    econ::PanelDataset p = econ::make_panel(firms, std::move(time), std::move(year));
    p.set_column("y", std::move(y_out));
    p.set_column("f", std::move(f_out));
    for (std::size_t j = 0; j < k; ++j) p.set_column(fmt::format("x{}", j + 1), std::move(x_out[j]));
    p.set_column("L1.y", econ::lag_column(p, p.column("y"), 1));
    return p;
}

}  // namespace revpanel::synth
