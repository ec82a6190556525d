#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace align {

// Text normalization used by CER/WER and the corpus filters: Unicode NFKC,
// lowercase, strip all punctuation (general category P), collapse runs of
// whitespace to single spaces, trim. Deterministic and idempotent.
std::string normalize_text(std::string_view raw);

// A string with its normalized character and word views. Chinese text is
// compared per character (codepoint); words are whitespace-delimited. The
// character sequence excludes whitespace, so CER is insensitive to spacing.
struct Transcript {
    std::string raw;
    std::string normalized;
    std::vector<char32_t> chars;
    std::vector<std::string> words;

    static Transcript normalize(std::string_view raw);
};

// Codepoint helpers shared with the corpus filters.
std::vector<char32_t> utf8_decode(std::string_view text);
std::string utf8_encode(const std::vector<char32_t>& codepoints);

bool is_cjk(char32_t cp);           // CJK Unified Ideographs block
bool is_punctuation(char32_t cp);   // Unicode general category P
bool is_space(char32_t cp);         // Unicode whitespace
bool contains_cjk(std::string_view text);

}  // namespace align
