#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace revpanel::cli {

// Flat key=value run configuration. Every key has a default; unknown keys
// are rejected. Relative paths are taken relative to the working directory.
class RunConfig {
public:
    RunConfig();

    // '#' starts a comment line; blank lines are skipped. Throws
    // revpanel::Error with the line number on malformed lines.
    void load_file(const std::filesystem::path& path);
    // Accepts "key=value".
    void apply_assignment(std::string_view assignment);
    void set(const std::string& key, std::string value);

    const std::string& get(std::string_view key) const;
    std::int64_t get_int(std::string_view key) const;
    std::uint64_t get_uint(std::string_view key) const;
    double get_double(std::string_view key) const;
    std::optional<double> get_optional_double(std::string_view key) const;
    bool get_bool(std::string_view key) const;
    // Comma-separated, entries trimmed, empties dropped.
    std::vector<std::string> get_list(std::string_view key) const;
    std::filesystem::path get_path(std::string_view key) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    static const std::vector<std::pair<std::string, std::string>>& defaults();

    // Sorted key=value lines; loading this text reproduces the config.
    std::string serialize() const;
    // Hex sha256 of serialize().
    std::string digest() const;

private:
    std::map<std::string, std::string> values_;
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace revpanel::cli
