#include "revpanel/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <future>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "revpanel/csv.hpp"
#include "revpanel/error.hpp"

namespace revpanel::ingest {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::vector<std::string> kCleanColumns = {
    "record_id", "firm_id", "product_id", "reviewer_id", "date",
    "stars",     "text",    "order_to_review_days",      "sector"};

std::optional<int> parse_int(std::string_view s) {
    if (s.empty()) return std::nullopt;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// Returns an empty string when valid, otherwise the reason.
std::string validate(const RawReview& r, const IngestOptions& options) {
    if (r.firm_id.empty()) return "empty firm_id";
    if (r.product_id.empty()) return "empty product_id";
    if (r.reviewer_id.empty()) return "empty reviewer_id";
    if (r.stars < 1 || r.stars > 5) return fmt::format("stars={} outside 1..5", r.stars);
    if (r.date < options.window_start || r.date > options.window_end) {
        return fmt::format("date {} outside sample window", format_date(r.date));
    }
    if (r.order_to_review_days && *r.order_to_review_days < 0) {
        return "negative order_to_review_days";
    }
    return {};
}

void log_invalid(const fs::path& path, std::size_t line, const std::string& why) {
    spdlog::warn("{}:{}: skipped malformed record ({})", path.string(), line, why);
}

ParseStats parse_csv(const fs::path& path, std::istream& in, const IngestOptions& options,
                     const std::function<void(RawReview&&)>& sink) {
    ParseStats stats;
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) return stats;
    csv::Header header(fields);
    const std::string file = path.string();
    const auto c_firm = header.require("firm_id", file);
    const auto c_prod = header.require("product_id", file);
    const auto c_user = header.require("reviewer_id", file);
    const auto c_date = header.require("date", file);
    const auto c_stars = header.require("stars", file);
    const auto c_text = header.require("text", file);
    const auto c_lag = header.find("order_to_review_days");
    const auto c_sector = header.find("sector");

    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        ++stats.records_read;
        const std::size_t line = reader.record_line();
        if (reader.last_record_malformed()) {
            ++stats.invalid_dropped;
            log_invalid(path, line, "unterminated quote");
            continue;
        }
        if (fields.size() != header.size()) {
            ++stats.invalid_dropped;
            log_invalid(path, line,
                        fmt::format("expected {} fields, got {}", header.size(), fields.size()));
            continue;
        }
        RawReview r;
        r.firm_id = fields[c_firm];
        r.product_id = fields[c_prod];
        r.reviewer_id = fields[c_user];
        auto date = parse_date(fields[c_date]);
        auto stars = parse_int(fields[c_stars]);
        if (!date || !stars) {
            ++stats.invalid_dropped;
            log_invalid(path, line, !date ? "unparseable date" : "unparseable stars");
            continue;
        }
        r.date = *date;
        r.stars = *stars;
        r.text = fields[c_text];
        if (c_lag && !fields[*c_lag].empty()) {
            auto lag = parse_int(fields[*c_lag]);
            if (!lag) {
                ++stats.invalid_dropped;
                log_invalid(path, line, "unparseable order_to_review_days");
                continue;
            }
            r.order_to_review_days = *lag;
        }
        if (c_sector && !fields[*c_sector].empty()) r.sector = fields[*c_sector];
        if (auto why = validate(r, options); !why.empty()) {
            ++stats.invalid_dropped;
            log_invalid(path, line, why);
            continue;
        }
        sink(std::move(r));
    }
    return stats;
}

std::optional<RawReview> review_from_json(const json& j, std::string& why) {
    auto get_string = [&](const char* key) -> std::optional<std::string> {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) {
            why = fmt::format("missing or non-string '{}'", key);
            return std::nullopt;
        }
        return it->get<std::string>();
    };
    RawReview r;
    auto firm = get_string("firm_id");
    if (!firm) return std::nullopt;
    auto prod = get_string("product_id");
    if (!prod) return std::nullopt;
    auto user = get_string("reviewer_id");
    if (!user) return std::nullopt;
    auto date_s = get_string("date");
    if (!date_s) return std::nullopt;
    auto text = get_string("text");
    if (!text) return std::nullopt;
    auto date = parse_date(*date_s);
    if (!date) {
        why = "unparseable date";
        return std::nullopt;
    }
    auto st = j.find("stars");
    if (st == j.end() || !st->is_number_integer()) {
        why = "missing or non-integer 'stars'";
        return std::nullopt;
    }
    r.firm_id = std::move(*firm);
    r.product_id = std::move(*prod);
    r.reviewer_id = std::move(*user);
    r.date = *date;
    r.stars = st->get<int>();
    r.text = std::move(*text);
    if (auto lag = j.find("order_to_review_days"); lag != j.end() && !lag->is_null()) {
        if (!lag->is_number_integer()) {
            why = "non-integer 'order_to_review_days'";
            return std::nullopt;
        }
        r.order_to_review_days = lag->get<int>();
    }
    if (auto sec = j.find("sector"); sec != j.end() && sec->is_string()) {
        r.sector = sec->get<std::string>();
    }
    return r;
}

ParseStats parse_jsonl(const fs::path& path, std::istream& in, const IngestOptions& options,
                       const std::function<void(RawReview&&)>& sink) {
    ParseStats stats;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++stats.records_read;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            ++stats.invalid_dropped;
            log_invalid(path, line_no, "invalid JSON object");
            continue;
        }
        std::string why;
        auto r = review_from_json(j, why);
        if (r) why = validate(*r, options);
        if (!r || !why.empty()) {
            ++stats.invalid_dropped;
            log_invalid(path, line_no, why);
            continue;
        }
        sink(std::move(*r));
    }
    return stats;
}

}  // namespace

std::optional<InputFormat> parse_input_format(std::string_view text) {
    if (text == "csv") return InputFormat::Csv;
    if (text == "jsonl") return InputFormat::Jsonl;
    return std::nullopt;
}

ParseStats parse_dump(const fs::path& path, const IngestOptions& options,
                      const std::function<void(RawReview&&)>& sink) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open review dump: {}", path.string()));
    return options.format == InputFormat::Csv ? parse_csv(path, in, options, sink)
                                              : parse_jsonl(path, in, options, sink);
}

ParsedDump read_dump(const fs::path& path, const IngestOptions& options) {
    ParsedDump out;
    out.stats = parse_dump(path, options, [&](RawReview&& r) { out.reviews.push_back(std::move(r)); });
    return out;
}

std::string dedup_key(const RawReview& r) {
    // Length-prefixed so no separator can collide with key content.
    return fmt::format("{}:{}|{}:{}|{}:{}|{}", r.firm_id.size(), r.firm_id, r.product_id.size(),
                       r.product_id, r.reviewer_id.size(), r.reviewer_id,
                       r.date.time_since_epoch().count());
}

bool Deduplicator::offer(const RawReview& review) {
    if (seen_.insert(dedup_key(review)).second) return true;
    ++dropped_;
    return false;
}

std::vector<ReviewRecord> deduplicate(const std::vector<RawReview>& reviews,
                                      std::size_t* duplicates_dropped, std::uint64_t first_id) {
    Deduplicator dedup;
    std::vector<ReviewRecord> out;
    out.reserve(reviews.size());
    std::uint64_t next_id = first_id;
    for (const auto& r : reviews) {
        if (!dedup.offer(r)) continue;
        ReviewRecord rec;
        static_cast<RawReview&>(rec) = r;
        rec.record_id = next_id++;
        out.push_back(std::move(rec));
    }
    if (duplicates_dropped) *duplicates_dropped = dedup.dropped();
    return out;
}

IngestResult ingest_files(const std::vector<fs::path>& paths, const IngestOptions& options) {
    std::vector<std::future<ParsedDump>> parsed;
    parsed.reserve(paths.size());
    for (const auto& p : paths) {
        parsed.push_back(std::async(std::launch::async, [p, &options] { return read_dump(p, options); }));
    }
    IngestResult result;
    std::vector<RawReview> all;
    for (auto& f : parsed) {
        ParsedDump d = f.get();
        result.report.records_read += d.stats.records_read;
        result.report.invalid_dropped += d.stats.invalid_dropped;
        std::move(d.reviews.begin(), d.reviews.end(), std::back_inserter(all));
    }
    result.records = deduplicate(all, &result.report.duplicates_dropped);
    result.report.records_kept = result.records.size();
    for (const auto& r : result.records) ++result.report.per_firm_counts[r.firm_id];
    return result;
}

std::string firm_file_stem(const std::string& firm_id) {
    std::string out;
    for (unsigned char c : firm_id) {
        if (std::isalnum(c) || c == '-' || c == '_') {
            out.push_back(static_cast<char>(c));
        } else {
            out += fmt::format("%{:02X}", c);
        }
    }
    return out;
}

std::vector<fs::path> write_clean_store(const fs::path& dir, const std::vector<ReviewRecord>& records) {
    fs::create_directories(dir);
    std::map<std::string, std::vector<const ReviewRecord*>> by_firm;
    for (const auto& r : records) by_firm[r.firm_id].push_back(&r);
    std::vector<fs::path> written;
    for (const auto& [firm, rows] : by_firm) {
        fs::path file = dir / (firm_file_stem(firm) + ".csv");
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(fmt::format("cannot write {}", file.string()));
        csv::write_row(out, kCleanColumns);
        for (const ReviewRecord* r : rows) {
            csv::write_row(out, {std::to_string(r->record_id), r->firm_id, r->product_id,
                                 r->reviewer_id, format_date(r->date), std::to_string(r->stars),
                                 r->text,
                                 r->order_to_review_days ? std::to_string(*r->order_to_review_days)
                                                         : std::string{},
                                 r->sector.value_or("")});
        }
        written.push_back(file);
    }
    return written;
}

std::vector<ReviewRecord> read_clean_store(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(fmt::format("clean store not found: {}", dir.string()));
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<ReviewRecord> out;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        csv::Reader reader(in);
        std::vector<std::string> fields;
        if (!reader.next(fields)) continue;
        csv::Header h(fields);
        const std::string name = file.string();
        const auto c_id = h.require("record_id", name);
        const auto c_firm = h.require("firm_id", name);
        const auto c_prod = h.require("product_id", name);
        const auto c_user = h.require("reviewer_id", name);
        const auto c_date = h.require("date", name);
        const auto c_stars = h.require("stars", name);
        const auto c_text = h.require("text", name);
        const auto c_lag = h.find("order_to_review_days");
        const auto c_sector = h.find("sector");
        while (reader.next(fields)) {
            if (fields.size() != h.size()) {
                throw Error(fmt::format("{}:{}: corrupt clean-store row", name, reader.record_line()));
            }
            ReviewRecord r;
            r.record_id = std::stoull(fields[c_id]);
            r.firm_id = fields[c_firm];
            r.product_id = fields[c_prod];
            r.reviewer_id = fields[c_user];
            auto date = parse_date(fields[c_date]);
            auto stars = parse_int(fields[c_stars]);
            if (!date || !stars) {
                throw Error(fmt::format("{}:{}: corrupt clean-store row", name, reader.record_line()));
            }
            r.date = *date;
            r.stars = *stars;
            r.text = fields[c_text];
            if (c_lag && !fields[*c_lag].empty()) r.order_to_review_days = parse_int(fields[*c_lag]);
            if (c_sector && !fields[*c_sector].empty()) r.sector = fields[*c_sector];
            out.push_back(std::move(r));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const ReviewRecord& a, const ReviewRecord& b) { return a.record_id < b.record_id; });
    return out;
}

void write_report_json(const fs::path& path, const IngestReport& report) {
    json j;
    j["records_read"] = report.records_read;
    j["records_kept"] = report.records_kept;
    j["duplicates_dropped"] = report.duplicates_dropped;
    j["invalid_dropped"] = report.invalid_dropped;
    j["per_firm_counts"] = report.per_firm_counts;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    out << j.dump(2) << '\n';
}

IngestReport read_report_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("ingest report not found: {}", path.string()));
    json j = json::parse(in);
    IngestReport r;
    r.records_read = j.at("records_read").get<std::size_t>();
    r.records_kept = j.at("records_kept").get<std::size_t>();
    r.duplicates_dropped = j.at("duplicates_dropped").get<std::size_t>();
    r.invalid_dropped = j.at("invalid_dropped").get<std::size_t>();
    r.per_firm_counts = j.at("per_firm_counts").get<std::map<std::string, std::size_t>>();
    return r;
}

}  // namespace revpanel::ingest
