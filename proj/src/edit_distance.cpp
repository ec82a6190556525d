#include "align/edit_distance.hpp"

#include "align/common.hpp"

namespace align {

double cer(const Transcript& reference, const Transcript& hypothesis) {
    if (reference.chars.empty()) {
        throw ValidationError("cer: reference normalizes to an empty character sequence");
    }
    const std::size_t dist = levenshtein(reference.chars, hypothesis.chars);
    return static_cast<double>(dist) / static_cast<double>(reference.chars.size());
}

double cer(std::string_view reference, std::string_view hypothesis) {
    return cer(Transcript::normalize(reference), Transcript::normalize(hypothesis));
}

double wer(const Transcript& reference, const Transcript& hypothesis) {
    if (reference.words.empty()) {
        throw ValidationError("wer: reference normalizes to an empty word sequence");
    }
    const std::size_t dist = levenshtein(reference.words, hypothesis.words);
    return static_cast<double>(dist) / static_cast<double>(reference.words.size());
}

double wer(std::string_view reference, std::string_view hypothesis) {
    return wer(Transcript::normalize(reference), Transcript::normalize(hypothesis));
}

}  // namespace align
