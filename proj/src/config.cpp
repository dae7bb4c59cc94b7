#include "revpanel/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "revpanel/csv.hpp"
#include "revpanel/error.hpp"

namespace revpanel::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& RunConfig::defaults() {
    static const std::vector<std::pair<std::string, std::string>> d = {
        {"seed", "1"},
        {"log_level", "info"},
        {"out_dir", "out"},
        {"input.reviews", ""},
        {"input.format", "csv"},
        {"input.lexicon_positive", ""},
        {"input.lexicon_negative", ""},
        {"input.market", ""},
        {"input.factors", ""},
        {"input.financials", ""},
        {"input.ccis", ""},
        {"sample.start", "2008-11-01"},
        {"sample.end", "2017-12-31"},
        {"eligibility.min_reviews", "1000"},
        {"eligibility.min_span_days", "365"},
        {"features.window_weeks", "1"},
        {"features.week_convention", "iso"},
        {"controls.beta_window", "50"},
        {"controls.beta_min_obs", "30"},
        {"controls.illiq_scale", "1000000"},
        {"controls.surprise_window", "8"},
        {"controls.surprise_min", "4"},
        {"controls.vol_window", "8"},
        {"controls.vol_min", "6"},
        {"controls.surprise_clamp", ""},
        {"controls.publication_lag_weeks", "0"},
        {"regress.outcome", "ret_lead"},
        {"regress.regressor", "diff_neg"},
        {"regress.controls", "ad,bm,rd,roa,size,ivol,gp,turn,beta,illiq,ag"},
        {"regress.firm_effects", "true"},
        {"regress.time_effects", "year"},
        {"regress.dynamic", "false"},
        {"regress.lag_depth", "1"},
        {"regress.lagged_controls", "false"},
        {"regress.se", "clustered"},
        {"gmm.min_lag", "2"},
        {"gmm.max_lag", "4"},
        {"gmm.collapse", "false"},
        {"gmm.time_dummies", "false"},
        {"gmm.weak_instrument_f", "10"},
        {"tables.names", "all"},
        {"synth.preset", "toy"},
        {"synth.format", "csv"},
        {"mc.estimator", "gmm"},
        {"mc.replications", "200"},
        {"mc.n_firms", "200"},
        {"mc.n_weeks", "10"},
        {"mc.rho", "0.5"},
        {"mc.beta", "0"},
        {"mc.gamma", ""},
        {"mc.firm_effect_sd", "1"},
        {"mc.time_effect_sd", "0"},
        {"mc.noise_sd", "1"},
        {"mc.feature_rho", "0.5"},
        {"mc.error_ar1", "0"},
        {"mc.burn_in", "50"},
        {"mc.threads", "0"},
        {"mc.level", "0.05"},
    };
    return d;
}

RunConfig::RunConfig() {
    for (const auto& [k, v] : defaults()) values_.emplace(k, v);
}

void RunConfig::set(const std::string& key, std::string value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error(fmt::format("unknown config key '{}'", key));
    it->second = std::move(value);
}

void RunConfig::apply_assignment(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw Error(fmt::format("expected key=value, got '{}'", assignment));
    set(std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1))));
}

void RunConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("config file not found: {}", path.string()));
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        try {
            apply_assignment(t);
        } catch (const Error& e) {
            throw Error(fmt::format("{}:{}: {}", path.string(), n, e.what()));
        }
    }
}

const std::string& RunConfig::get(std::string_view key) const {
    auto it = values_.find(std::string(key));
    if (it == values_.end()) throw Error(fmt::format("unknown config key '{}'", key));
    return it->second;
}

std::int64_t RunConfig::get_int(std::string_view key) const {
    const auto& s = get(key);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw Error(fmt::format("config key '{}' expects an integer, got '{}'", key, s));
    return v;
}

std::uint64_t RunConfig::get_uint(std::string_view key) const {
    const auto& s = get(key);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw Error(fmt::format("config key '{}' expects a non-negative integer, got '{}'", key, s));
    return v;
}

double RunConfig::get_double(std::string_view key) const {
    auto v = get_optional_double(key);
    if (!v) throw Error(fmt::format("config key '{}' expects a number", key));
    return *v;
}

std::optional<double> RunConfig::get_optional_double(std::string_view key) const {
    const auto& s = get(key);
    if (s.empty()) return std::nullopt;
    auto v = csv::parse_optional_double(s);
    if (!v) throw Error(fmt::format("config key '{}' expects a number, got '{}'", key, s));
    return v;
}

bool RunConfig::get_bool(std::string_view key) const {
    const auto& s = get(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw Error(fmt::format("config key '{}' expects true/false, got '{}'", key, s));
}

std::vector<std::string> RunConfig::get_list(std::string_view key) const {
    std::vector<std::string> out;
    std::stringstream ss(get(key));
    for (std::string item; std::getline(ss, item, ',');) {
        auto t = trim(item);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::filesystem::path RunConfig::get_path(std::string_view key) const {
    const auto& s = get(key);
    if (s.empty()) throw Error(fmt::format("config key '{}' must name a file", key));
    return s;
}

std::string RunConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : values_) out += fmt::format("{}={}\n", k, v);
    return out;
}

std::string RunConfig::digest() const { return sha256_hex(serialize()); }

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("input file not found: {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

}  // namespace revpanel::cli
