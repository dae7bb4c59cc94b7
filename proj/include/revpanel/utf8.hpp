#pragma once

#include <string>
#include <string_view>

namespace revpanel::utf8 {

// Malformed sequences decode to U+FFFD, one replacement per offending byte.
std::u32string decode(std::string_view bytes);
std::string encode(std::u32string_view cps);

// Simple (1:1) case folding for the cased scripts that occur in product
// reviews: ASCII, Latin-1, Latin Extended-A, Greek, Cyrillic and fullwidth
// Latin. Code points outside these blocks fold to themselves.
char32_t simple_fold(char32_t cp);
std::u32string fold(std::u32string_view cps);

std::string_view trim(std::string_view s);

}  // namespace revpanel::utf8
