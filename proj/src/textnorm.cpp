#include "align/textnorm.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <stdexcept>

#include "align/common.hpp"

namespace align {

namespace {

const icu::Normalizer2& nfkc() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* instance = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status) || instance == nullptr) {
        throw NumericalError("ICU NFKC normalizer unavailable");
    }
    return *instance;
}

}  // namespace

std::vector<char32_t> utf8_decode(std::string_view text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        char32_t cp = 0;
        std::size_t len = 1;
        if (c < 0x80) {
            cp = c;
        } else if ((c >> 5) == 0x6) {
            cp = c & 0x1f;
            len = 2;
        } else if ((c >> 4) == 0xe) {
            cp = c & 0x0f;
            len = 3;
        } else if ((c >> 3) == 0x1e) {
            cp = c & 0x07;
            len = 4;
        } else {
            out.push_back(0xfffd);
            ++i;
            continue;
        }
        if (i + len > text.size()) {
            out.push_back(0xfffd);
            break;
        }
        bool valid = true;
        for (std::size_t t = 1; t < len; ++t) {
            const unsigned char cc = static_cast<unsigned char>(text[i + t]);
            if ((cc >> 6) != 0x2) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (cc & 0x3f);
        }
        if (!valid) {
            out.push_back(0xfffd);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string utf8_encode(const std::vector<char32_t>& codepoints) {
    std::string out;
    out.reserve(codepoints.size());
    for (char32_t cp : codepoints) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
        } else {
            out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
        }
    }
    return out;
}

bool is_cjk(char32_t cp) { return cp >= 0x4e00 && cp <= 0x9fff; }

bool is_punctuation(char32_t cp) {
    return (U_GET_GC_MASK(static_cast<UChar32>(cp)) & U_GC_P_MASK) != 0;
}

bool is_space(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)) != 0; }

bool contains_cjk(std::string_view text) {
    for (char32_t cp : utf8_decode(text)) {
        if (is_cjk(cp)) return true;
    }
    return false;
}

std::string normalize_text(std::string_view raw) {
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString input =
        icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int>(raw.size())));
    icu::UnicodeString folded = nfkc().normalize(input, status);
    if (U_FAILURE(status)) {
        throw ValidationError("text normalization failed");
    }
    // Root locale keeps case folding independent of the host environment.
    folded.toLower(icu::Locale::getRoot());

    std::string utf8;
    folded.toUTF8String(utf8);

    std::vector<char32_t> kept;
    kept.reserve(utf8.size());
    bool pending_space = false;
    for (char32_t cp : utf8_decode(utf8)) {
        if (is_space(cp)) {
            pending_space = !kept.empty();
            continue;
        }
        if (is_punctuation(cp)) continue;
        if (pending_space) {
            kept.push_back(U' ');
            pending_space = false;
        }
        kept.push_back(cp);
    }
    return utf8_encode(kept);
}

Transcript Transcript::normalize(std::string_view raw) {
    Transcript t;
    t.raw = std::string(raw);
    t.normalized = normalize_text(raw);

    std::string word;
    for (char32_t cp : utf8_decode(t.normalized)) {
        if (cp == U' ') {
            if (!word.empty()) {
                t.words.push_back(std::move(word));
                word.clear();
            }
            continue;
        }
        t.chars.push_back(cp);
        word += utf8_encode({cp});
    }
    if (!word.empty()) t.words.push_back(std::move(word));
    return t;
}

}  // namespace align
