#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "revpanel/config.hpp"
#include "revpanel/error.hpp"
#include "revpanel/pipeline.hpp"

using namespace revpanel;

int main(int argc, char** argv) {
    CLI::App app{"Review-sentiment panel pipeline: ingest, features, panel, regressions, synthetic data"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", cli::kVersion);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string log_level;
    std::vector<std::string> assignments;
    bool print_config = false;
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--seed", seed, "random seed (overrides config)");
    app.add_option("--out-dir", out_dir, "output directory (overrides config)");
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));
    app.add_option("--set", assignments, "config override key=value (repeatable)");
    app.add_flag("--print-config", print_config, "print the effective config before running");

    const std::vector<std::pair<std::string, std::pair<std::string, std::function<void(const cli::RunConfig&)>>>>
        commands = {
            {"ingest", {"parse and deduplicate review dumps into a clean store", cli::cmd_ingest}},
            {"summary", {"review, product and firm counts of the clean store", cli::cmd_summary}},
            {"features", {"firm-week sentiment and star features of eligible firms", cli::cmd_features}},
            {"panel", {"weekly controls joined with features into the regression panel", cli::cmd_panel}},
            {"regress", {"one fixed-effects or GMM regression on the panel", cli::cmd_regress}},
            {"tables", {"the full set of regression tables", cli::cmd_tables}},
            {"synth", {"write a synthetic input bundle", cli::cmd_synth}},
            {"mc", {"Monte Carlo study of the dynamic panel estimators", cli::cmd_mc}},
            {"all", {"ingest, summary, features, panel and tables in sequence", cli::cmd_all}},
        };
    std::map<CLI::App*, std::function<void(const cli::RunConfig&)>> handlers;
    for (const auto& [name, info] : commands) handlers[app.add_subcommand(name, info.first)] = info.second;

    CLI11_PARSE(app, argc, argv);

    auto logger = spdlog::stderr_color_mt("revpanel");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    try {
        cli::RunConfig config;
        if (!config_path.empty()) config.load_file(config_path);
        for (const auto& a : assignments) config.apply_assignment(a);
        if (seed) config.set("seed", std::to_string(*seed));
        if (!out_dir.empty()) config.set("out_dir", out_dir);
        if (!log_level.empty()) config.set("log_level", log_level);
        spdlog::set_level(spdlog::level::from_str(config.get("log_level")));
        if (print_config) std::fputs(config.serialize().c_str(), stdout);

        for (auto* sub : app.get_subcommands()) handlers.at(sub)(config);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
