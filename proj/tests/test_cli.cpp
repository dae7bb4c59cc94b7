#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <map>

#include <nlohmann/json.hpp>

#include "revpanel/config.hpp"
#include "revpanel/error.hpp"
#include "revpanel/pipeline.hpp"
#include "test_util.hpp"

using namespace revpanel;
using namespace revpanel::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = REVPANEL_SOURCE_DIR;

struct Run {
    int status = 0;
    std::string output;  // stdout and stderr
};

// Runs the CLI from the source tree so bundled config paths resolve.
Run run_cli(const std::string& args, const fs::path& scratch) {
    const fs::path log = scratch / "cli_output.txt";
    const std::string cmd = "cd \"" + kSource.string() + "\" && \"" + std::string(REVPANEL_CLI) + "\" " + args +
                            " > \"" + log.string() + "\" 2>&1";
    Run r;
    r.status = std::system(cmd.c_str());
    r.output = read_file(log);
    return r;
}

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
    return out;
}

}  // namespace

TEST_CASE("config serializes and reloads to the same values") {
    RunConfig c;
    c.set("seed", "17");
    c.apply_assignment("regress.controls = size, bm ,roa");
    c.set("controls.surprise_clamp", "3.5");
    CHECK(c.get_uint("seed") == 17);
    CHECK(c.get_list("regress.controls") == std::vector<std::string>{"size", "bm", "roa"});
    CHECK(*c.get_optional_double("controls.surprise_clamp") == 3.5);
    CHECK_FALSE(RunConfig().get_optional_double("controls.surprise_clamp").has_value());

    const auto dir = scratch_dir("config");
    write_file(dir / "c.txt", c.serialize());
    RunConfig back;
    back.load_file(dir / "c.txt");
    CHECK(back.values() == c.values());
    CHECK(back.digest() == c.digest());
    CHECK(back.digest() != RunConfig().digest());
    CHECK(RunConfig().values().size() == RunConfig::defaults().size());
}

TEST_CASE("config errors") {
    RunConfig c;
    CHECK_THROWS_AS(c.set("no.such.key", "1"), Error);
    CHECK_THROWS_AS(c.apply_assignment("seed"), Error);
    c.set("seed", "abc");
    CHECK_THROWS_AS(c.get_uint("seed"), Error);
    c.set("regress.firm_effects", "maybe");
    CHECK_THROWS_AS(c.get_bool("regress.firm_effects"), Error);

    const auto dir = scratch_dir("config_errors");
    write_file(dir / "bad.txt", "# comment\nseed=3\n\nthis line is wrong\n");
    try {
        RunConfig().load_file(dir / "bad.txt");
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find(":4") != std::string::npos);
    }
    try {
        RunConfig().load_file(dir / "missing.txt");
        FAIL("expected a missing-file error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("missing.txt") != std::string::npos);
    }
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("summary counts with and without sectors") {
    std::vector<ingest::ReviewRecord> recs(4);
    const char* firms[] = {"A", "A", "B", "C"};
    const char* products[] = {"p1", "p2", "p1", "p9"};
    for (std::size_t i = 0; i < 4; ++i) {
        recs[i].firm_id = firms[i];
        recs[i].product_id = products[i];
    }
    auto rows = summarize(recs);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].group == "all");
    CHECK(rows[0].reviews == 4);
    CHECK(rows[0].products == 4);  // products are keyed by firm
    CHECK(rows[0].firms == 3);

    recs[0].sector = "food";
    recs[1].sector = "food";
    recs[2].sector = "toys";
    rows = summarize(recs);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].group == "food");
    CHECK(rows[1].reviews == 2);
    CHECK(rows[1].firms == 1);
    CHECK(rows[2].group == "toys");
}

TEST_CASE("regress before panel fails naming the panel file") {
    const auto dir = scratch_dir("cli_regress_first");
    const auto r = run_cli("regress --out-dir \"" + (dir / "out").string() + "\"", dir);
    CHECK(r.status != 0);
    CHECK(r.output.find("panel file not found") != std::string::npos);
}

TEST_CASE("missing input names the path") {
    const auto dir = scratch_dir("cli_missing_input");
    const auto r = run_cli("ingest --out-dir \"" + (dir / "out").string() + "\" --set input.reviews=nowhere/reviews.csv",
                           dir);
    CHECK(r.status != 0);
    CHECK(r.output.find("nowhere/reviews.csv") != std::string::npos);
}

TEST_CASE("version and unknown keys") {
    const auto dir = scratch_dir("cli_version");
    auto r = run_cli("--version", dir);
    CHECK(r.status == 0);
    CHECK(r.output.find(kVersion) != std::string::npos);
    r = run_cli("summary --set bogus=1", dir);
    CHECK(r.status != 0);
    CHECK(r.output.find("bogus") != std::string::npos);
}

TEST_CASE("toy pipeline: golden features, manifest counts, identical reruns") {
    const auto dir = scratch_dir("cli_toy");
    const std::string args = "all --config data/toy/config.txt --log-level warn --out-dir \"";
    const auto first = run_cli(args + (dir / "a").string() + "\"", dir);
    REQUIRE_MESSAGE(first.status == 0, first.output);
    CHECK(read_file(dir / "a" / "features" / "features.csv") == read_file(kSource / "data/toy/golden_features.csv"));

    const auto manifest = nlohmann::json::parse(read_file(kSource / "data/toy/manifest.json"));
    const std::string summary = read_file(dir / "a" / "summary" / "summary.csv");
    const std::string expected_all = "all," + std::to_string(manifest["counts"]["kept"].get<int>()) + "," +
                                     std::to_string(3 * 12) + "," +
                                     std::to_string(manifest["counts"]["firms"].get<int>()) + "\n";
    CHECK(summary.find(expected_all) != std::string::npos);
    const auto report = nlohmann::json::parse(read_file(dir / "a" / "ingest" / "ingest_report.json"));
    CHECK(report["duplicates_dropped"] == manifest["counts"]["duplicates"]);
    CHECK(report["invalid_dropped"] == 0);

    const auto stage = nlohmann::json::parse(read_file(dir / "a" / "features" / "manifest.json"));
    CHECK(stage["command"] == "features");
    CHECK(stage["outputs"].contains("features.csv"));
    CHECK(stage["config_digest"].get<std::string>().size() == 64);

    // Same config, same out_dir: byte-identical tree.
    const auto before = tree_bytes(dir / "a");
    const auto again = run_cli(args + (dir / "a").string() + "\"", dir);
    REQUIRE(again.status == 0);
    const auto after = tree_bytes(dir / "a");
    CHECK(before.size() == after.size());
    for (const auto& [name, bytes] : before) {
        INFO(name);
        CHECK(after.count(name) == 1);
        if (after.count(name)) CHECK(after.at(name) == bytes);
    }
}

TEST_CASE("synth bundle config drives the pipeline") {
    const auto dir = scratch_dir("cli_synth");
    const auto out = dir / "gen";
    auto r = run_cli("synth --seed 5 --out-dir \"" + out.string() + "\" --set synth.format=jsonl", dir);
    REQUIRE_MESSAGE(r.status == 0, r.output);
    CHECK(fs::exists(out / "synth" / "bundle" / "reviews.jsonl"));
    CHECK(fs::exists(out / "synth" / "bundle.conf"));
    r = run_cli("ingest --config \"" + (out / "synth" / "bundle.conf").string() + "\" --out-dir \"" +
                    (dir / "run").string() + "\"",
                dir);
    REQUIRE_MESSAGE(r.status == 0, r.output);
    const auto report = nlohmann::json::parse(read_file(dir / "run" / "ingest" / "ingest_report.json"));
    CHECK(report["invalid_dropped"] == 0);
    CHECK(report["records_read"].get<int>() > 0);
}
