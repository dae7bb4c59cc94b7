#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "revpanel/config.hpp"
#include "revpanel/ingest.hpp"

namespace revpanel::cli {

inline constexpr const char* kVersion = "0.1.0";

// Output locations under out_dir.
struct Layout {
    std::filesystem::path root;
    std::filesystem::path stage(std::string_view name) const { return root / std::string(name); }
    std::filesystem::path clean_store() const { return root / "ingest" / "clean"; }
    std::filesystem::path ingest_report() const { return root / "ingest" / "ingest_report.json"; }
    std::filesystem::path features() const { return root / "features" / "features.csv"; }
    std::filesystem::path eligibility() const { return root / "features" / "eligibility.csv"; }
    std::filesystem::path controls() const { return root / "panel" / "controls.csv"; }
    std::filesystem::path panel() const { return root / "panel" / "panel.csv"; }
};

Layout layout_of(const RunConfig& config);

// Each command writes its outputs plus <stage>/manifest.json and
// <stage>/config.txt. Failures throw revpanel::Error.
void cmd_ingest(const RunConfig& config);
void cmd_summary(const RunConfig& config);
void cmd_features(const RunConfig& config);
void cmd_panel(const RunConfig& config);
void cmd_regress(const RunConfig& config);
void cmd_tables(const RunConfig& config);
void cmd_synth(const RunConfig& config);
void cmd_mc(const RunConfig& config);

// ingest, features, panel, tables in sequence.
void cmd_all(const RunConfig& config);

struct SummaryRow {
    std::string group;  // "all" or a sector tag
    std::size_t reviews = 0;
    std::size_t products = 0;
    std::size_t firms = 0;
};

// Overall counts first, then one row per sector when any record has one.
std::vector<SummaryRow> summarize(const std::vector<ingest::ReviewRecord>& records);

// Config written next to a synthetic bundle that runs the pipeline on it.
std::string bundle_config(const std::filesystem::path& bundle_dir, ingest::InputFormat format,
                          std::uint64_t seed);

}  // namespace revpanel::cli
