#include "revpanel/csv.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "revpanel/error.hpp"

namespace revpanel::csv {

Reader::Reader(std::istream& in, char delimiter) : in_(in), delim_(delimiter) {}

bool Reader::next(std::vector<std::string>& fields) {
    fields.clear();
    malformed_ = false;
    int c = in_.get();
    if (c == EOF) return false;
    record_line_ = line_;

    std::string field;
    bool quoted = false;
    bool field_started_quoted = false;
    while (true) {
        if (c == EOF) {
            if (quoted) malformed_ = true;
            fields.push_back(std::move(field));
            return true;
        }
        char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (in_.peek() == '"') {
                    field.push_back('"');
                    in_.get();
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line_;
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty() && !field_started_quoted) {
            quoted = true;
            field_started_quoted = true;
        } else if (ch == delim_) {
            fields.push_back(std::move(field));
            field.clear();
            field_started_quoted = false;
        } else if (ch == '\r' && in_.peek() == '\n') {
            // swallow, newline handled next iteration
        } else if (ch == '\n') {
            ++line_;
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(ch);
        }
        c = in_.get();
    }
}

Header::Header(const std::vector<std::string>& names) : names_(names) {
    for (std::size_t i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);
}

std::optional<std::size_t> Header::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Header::require(std::string_view name, std::string_view file) const {
    auto pos = find(name);
    if (!pos) throw Error(fmt::format("{}: missing required column '{}'", file, name));
    return *pos;
}

std::string escape(std::string_view field, char delimiter) {
    bool needs = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos;
    if (!needs) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(delimiter);
        out << escape(fields[i], delimiter);
    }
    out.put('\n');
}

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    return fmt::format("{}", v);
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string{};
}

std::optional<double> parse_optional_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (s.empty() || s == "NA" || s == "nan" || s == "NaN") return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(fmt::format("not a number: '{}'", s));
    }
    return v;
}

}  // namespace revpanel::csv
