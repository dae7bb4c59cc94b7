#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace revpanel::sentiment {

struct SentimentCount {
    std::uint32_t nw = 0;  // negative-term matches
    std::uint32_t pw = 0;  // positive-term matches
    bool operator==(const SentimentCount&) const = default;
};

enum class Polarity { Negative, Positive, Neutral };

std::string_view to_string(Polarity p);

// Strict inequality on each side; ties are neutral.
constexpr Polarity classify(SentimentCount c) {
    if (c.nw > c.pw) return Polarity::Negative;
    if (c.pw > c.nw) return Polarity::Positive;
    return Polarity::Neutral;
}

// Immutable positive/negative term sets with a code-point trie for greedy
// longest-match scanning. Terms are stored case-folded.
class Lexicon {
public:
    // Throws revpanel::Error on an empty term, a term present in both sets
    // (after case folding), or when both sets are empty.
    Lexicon(const std::vector<std::string>& positive, const std::vector<std::string>& negative);

    const std::set<std::string>& positive_terms() const { return positive_; }
    const std::set<std::string>& negative_terms() const { return negative_; }

    SentimentCount count(std::string_view text) const;

private:
    enum class Tag : std::uint8_t { None, Positive, Negative };
    struct Node {
        std::vector<std::pair<char32_t, std::uint32_t>> children;  // sorted by code point
        Tag tag = Tag::None;
    };

    void insert(std::u32string_view term, Tag tag);
    std::uint32_t child(std::uint32_t node, char32_t cp) const;

    std::set<std::string> positive_;
    std::set<std::string> negative_;
    std::vector<Node> nodes_;
};

// One term per line; blank lines and '#' comments ignored; surrounding
// whitespace trimmed.
std::vector<std::string> read_term_file(const std::filesystem::path& path);
Lexicon load_lexicon(const std::filesystem::path& positive_path,
                     const std::filesystem::path& negative_path);

inline SentimentCount count_tendentious(std::string_view text, const Lexicon& lexicon) {
    return lexicon.count(text);
}

}  // namespace revpanel::sentiment
