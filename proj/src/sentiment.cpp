#include "revpanel/sentiment.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "revpanel/error.hpp"
#include "revpanel/utf8.hpp"

namespace revpanel::sentiment {

std::string_view to_string(Polarity p) {
    switch (p) {
        case Polarity::Negative: return "negative";
        case Polarity::Positive: return "positive";
        case Polarity::Neutral: return "neutral";
    }
    return "neutral";
}

Lexicon::Lexicon(const std::vector<std::string>& positive, const std::vector<std::string>& negative) {
    nodes_.emplace_back();
    auto fold_all = [](const std::vector<std::string>& terms, std::set<std::string>& out) {
        for (const auto& raw : terms) {
            std::string_view t = utf8::trim(raw);
            if (t.empty()) throw Error("lexicon contains an empty term");
            out.insert(utf8::encode(utf8::fold(utf8::decode(t))));
        }
    };
    fold_all(positive, positive_);
    fold_all(negative, negative_);
    for (const auto& t : positive_) {
        if (negative_.count(t)) {
            throw Error(fmt::format("lexicon term '{}' appears in both positive and negative lists", t));
        }
    }
    if (positive_.empty() && negative_.empty()) throw Error("lexicon is empty");
    for (const auto& t : positive_) insert(utf8::decode(t), Tag::Positive);
    for (const auto& t : negative_) insert(utf8::decode(t), Tag::Negative);
}

std::uint32_t Lexicon::child(std::uint32_t node, char32_t cp) const {
    const auto& kids = nodes_[node].children;
    auto it = std::lower_bound(kids.begin(), kids.end(), cp,
                               [](const auto& p, char32_t v) { return p.first < v; });
    return (it != kids.end() && it->first == cp) ? it->second : 0;
}

void Lexicon::insert(std::u32string_view term, Tag tag) {
    std::uint32_t node = 0;
    for (char32_t cp : term) {
        std::uint32_t next = child(node, cp);
        if (next == 0) {
            next = static_cast<std::uint32_t>(nodes_.size());
            nodes_.emplace_back();
            auto& kids = nodes_[node].children;
            auto it = std::lower_bound(kids.begin(), kids.end(), cp,
                                       [](const auto& p, char32_t v) { return p.first < v; });
            kids.insert(it, {cp, next});
        }
        node = next;
    }
    nodes_[node].tag = tag;
}

SentimentCount Lexicon::count(std::string_view text) const {
    const std::u32string cps = utf8::fold(utf8::decode(text));
    SentimentCount out;
    std::size_t i = 0;
    while (i < cps.size()) {
        std::uint32_t node = 0;
        std::size_t best_len = 0;
        Tag best_tag = Tag::None;
        for (std::size_t j = i; j < cps.size(); ++j) {
            node = child(node, cps[j]);
            if (node == 0) break;
            if (nodes_[node].tag != Tag::None) {
                best_len = j - i + 1;
                best_tag = nodes_[node].tag;
            }
        }
        if (best_len == 0) {
            ++i;
            continue;
        }
        if (best_tag == Tag::Positive) ++out.pw;
        else ++out.nw;
        i += best_len;
    }
    return out;
}

std::vector<std::string> read_term_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open lexicon file: {}", path.string()));
    std::vector<std::string> terms;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::string_view v = line;
        if (first && v.substr(0, 3) == "\xEF\xBB\xBF") v.remove_prefix(3);  // BOM
        first = false;
        v = utf8::trim(v);
        if (v.empty() || v.front() == '#') continue;
        terms.emplace_back(v);
    }
    return terms;
}

Lexicon load_lexicon(const std::filesystem::path& positive_path,
                     const std::filesystem::path& negative_path) {
    return Lexicon(read_term_file(positive_path), read_term_file(negative_path));
}

}  // namespace revpanel::sentiment
