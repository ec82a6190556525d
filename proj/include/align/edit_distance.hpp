#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "align/textnorm.hpp"

namespace align {

// Unit-cost insert/delete/substitute edit distance, two-row DP. Works on any
// indexable sequence with equality-comparable elements (neighbor index
// lists, codepoint sequences, word sequences).
template <typename SeqA, typename SeqB>
std::size_t levenshtein(const SeqA& a, const SeqB& b) {
    const std::size_t la = a.size();
    const std::size_t lb = b.size();
    if (la == 0) return lb;
    if (lb == 0) return la;

    std::vector<std::size_t> prev(lb + 1), cur(lb + 1);
    for (std::size_t j = 0; j <= lb; ++j) prev[j] = j;
    for (std::size_t i = 0; i < la; ++i) {
        cur[0] = i + 1;
        for (std::size_t j = 0; j < lb; ++j) {
            const std::size_t substitute = prev[j] + (a[i] == b[j] ? 0 : 1);
            cur[j + 1] = std::min({substitute, prev[j + 1] + 1, cur[j] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[lb];
}

// Character error rate: edit distance over normalized character sequences
// divided by the reference character count. May exceed 1. The reference must
// normalize to at least one character.
double cer(const Transcript& reference, const Transcript& hypothesis);
double cer(std::string_view reference, std::string_view hypothesis);

// Word error rate: edit distance over normalized word sequences divided by
// the reference word count.
double wer(const Transcript& reference, const Transcript& hypothesis);
double wer(std::string_view reference, std::string_view hypothesis);

}  // namespace align
