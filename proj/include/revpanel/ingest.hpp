#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "revpanel/calendar.hpp"

namespace revpanel::ingest {

enum class InputFormat { Csv, Jsonl };

std::optional<InputFormat> parse_input_format(std::string_view text);

struct RawReview {
    std::string firm_id;
    std::string product_id;
    std::string reviewer_id;
    Date date{};
    int stars = 0;
    std::string text;
    std::optional<int> order_to_review_days;
    // Optional industry tag, only used by the summary report.
    std::optional<std::string> sector;
};

struct ReviewRecord : RawReview {
    std::uint64_t record_id = 0;
};

struct IngestReport {
    std::size_t records_read = 0;
    std::size_t records_kept = 0;
    std::size_t duplicates_dropped = 0;
    std::size_t invalid_dropped = 0;
    std::map<std::string, std::size_t> per_firm_counts;

    bool balanced() const {
        return records_read == records_kept + duplicates_dropped + invalid_dropped;
    }
};

struct IngestOptions {
    InputFormat format = InputFormat::Csv;
    Date window_start = *parse_date("2008-11-01");
    Date window_end = *parse_date("2017-12-31");
};

struct ParseStats {
    std::size_t records_read = 0;
    std::size_t invalid_dropped = 0;
};

// Streams every well-formed record in file order into `sink`. Malformed rows
// are counted, skipped and logged with their line number. Throws
// revpanel::Error when the file cannot be opened or lacks required columns.
ParseStats parse_dump(const std::filesystem::path& path, const IngestOptions& options,
                      const std::function<void(RawReview&&)>& sink);

struct ParsedDump {
    std::vector<RawReview> reviews;
    ParseStats stats;
};
ParsedDump read_dump(const std::filesystem::path& path, const IngestOptions& options);

// First occurrence of each (firm, product, reviewer, date) key wins.
class Deduplicator {
public:
    // True when the record's key has not been seen before.
    bool offer(const RawReview& review);
    std::size_t dropped() const { return dropped_; }

private:
    std::unordered_set<std::string> seen_;
    std::size_t dropped_ = 0;
};

std::string dedup_key(const RawReview& review);

// Assigns sequential record ids in output order starting at `first_id`.
std::vector<ReviewRecord> deduplicate(const std::vector<RawReview>& reviews,
                                      std::size_t* duplicates_dropped = nullptr,
                                      std::uint64_t first_id = 1);

struct IngestResult {
    std::vector<ReviewRecord> records;
    IngestReport report;
};

// Parses files concurrently, then applies the dedup rule globally in the
// order the paths are given.
IngestResult ingest_files(const std::vector<std::filesystem::path>& paths,
                          const IngestOptions& options);

// One CSV per firm, named by an escaped firm id.
std::vector<std::filesystem::path> write_clean_store(const std::filesystem::path& dir,
                                                     const std::vector<ReviewRecord>& records);
// Records from every *.csv in `dir`, ordered by record id.
std::vector<ReviewRecord> read_clean_store(const std::filesystem::path& dir);

std::string firm_file_stem(const std::string& firm_id);

void write_report_json(const std::filesystem::path& path, const IngestReport& report);
IngestReport read_report_json(const std::filesystem::path& path);

}  // namespace revpanel::ingest
