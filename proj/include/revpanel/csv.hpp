#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace revpanel::csv {

// RFC 4180 reader: quoted fields may contain delimiters, doubled quotes and
// line breaks. Tracks the physical line on which each record starts.
class Reader {
public:
    explicit Reader(std::istream& in, char delimiter = ',');

    // False at end of input.
    bool next(std::vector<std::string>& fields);
    std::size_t record_line() const { return record_line_; }
    // Set when the last record ended inside an unterminated quote.
    bool last_record_malformed() const { return malformed_; }

private:
    std::istream& in_;
    char delim_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
    bool malformed_ = false;
};

// Header-name -> column position.
class Header {
public:
    Header() = default;
    explicit Header(const std::vector<std::string>& names);
    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t require(std::string_view name, std::string_view file) const;
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

std::string escape(std::string_view field, char delimiter = ',');
void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter = ',');

// Shortest round-trip formatting; empty string for nullopt.
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);
std::optional<double> parse_optional_double(std::string_view s);

}  // namespace revpanel::csv
