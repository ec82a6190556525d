#include "align/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "align/edit_distance.hpp"
#include "internal.hpp"

namespace align {

std::string_view language_name(Language lang) {
    switch (lang) {
        case Language::zh: return "zh";
        case Language::en: return "en";
        case Language::mixed: return "mixed";
    }
    return "en";
}

Language language_from_name(std::string_view name) {
    if (name == "zh") return Language::zh;
    if (name == "en") return Language::en;
    if (name == "mixed") return Language::mixed;
    throw ValidationError("unknown language: " + std::string(name));
}

std::string_view reject_reason_name(RejectReason reason) {
    switch (reason) {
        case RejectReason::length: return "length";
        case RejectReason::nontext_ratio: return "nontext_ratio";
        case RejectReason::pattern: return "pattern";
        case RejectReason::chat_unsuitable: return "chat_unsuitable";
        case RejectReason::roundtrip_failed: return "roundtrip_failed";
    }
    return "length";
}

namespace {

bool is_ascii_alpha(char32_t cp) {
    return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z');
}

std::size_t count_cjk(const std::vector<char32_t>& cps) {
    std::size_t count = 0;
    for (char32_t cp : cps) {
        if (is_cjk(cp)) ++count;
    }
    return count;
}

// Whitespace-delimited tokens containing at least one letter.
std::size_t count_words(const std::vector<char32_t>& cps) {
    std::size_t words = 0;
    bool in_token = false;
    bool token_has_letter = false;
    for (char32_t cp : cps) {
        if (is_space(cp)) {
            if (in_token && token_has_letter) ++words;
            in_token = false;
            token_has_letter = false;
            continue;
        }
        in_token = true;
        if (is_ascii_alpha(cp)) token_has_letter = true;
    }
    if (in_token && token_has_letter) ++words;
    return words;
}

}  // namespace

std::optional<RejectReason> length_filter(const CorpusRecord& record, const FilterConfig& cfg) {
    const std::vector<char32_t> cps = utf8_decode(record.text);
    const std::size_t cjk = count_cjk(cps);
    if (cjk >= 1) {
        if (cjk > static_cast<std::size_t>(cfg.max_zh_chars)) return RejectReason::length;
        return std::nullopt;
    }
    if (count_words(cps) > static_cast<std::size_t>(cfg.max_en_words)) {
        return RejectReason::length;
    }
    return std::nullopt;
}

std::optional<RejectReason> nontext_ratio_filter(const CorpusRecord& record,
                                                 const FilterConfig& cfg) {
    std::size_t non_whitespace = 0;
    std::size_t text_chars = 0;
    for (char32_t cp : utf8_decode(record.text)) {
        if (is_space(cp)) continue;
        ++non_whitespace;
        if (is_punctuation(cp) || is_ascii_alpha(cp) || is_cjk(cp)) ++text_chars;
    }
    if (non_whitespace == 0) {
        // Nothing but whitespace cannot be synthesized; degenerate reject.
        return RejectReason::nontext_ratio;
    }
    const double ratio = static_cast<double>(non_whitespace - text_chars) /
                         static_cast<double>(non_whitespace);
    if (ratio > cfg.max_nontext_ratio) return RejectReason::nontext_ratio;
    return std::nullopt;
}

std::optional<RejectReason> pattern_filter(const CorpusRecord& record) {
    static const std::regex url_re(R"((https?|ftp)://[^\s]+|\bwww\.[^\s]+)");
    static const std::regex path_re(R"((^|\s)(/[A-Za-z0-9_.-]+){2,}|\b[A-Za-z]:\\[^\s]+)");
    static const std::regex latex_re(R"(\\[A-Za-z]+\{|\$[^$]+\$|\\begin\{)");
    if (std::regex_search(record.text, url_re) || std::regex_search(record.text, path_re) ||
        std::regex_search(record.text, latex_re)) {
        return RejectReason::pattern;
    }
    return std::nullopt;
}

const std::vector<std::string>& default_blocklist() {
    static const std::vector<std::string> phrases = {
        "above passage",
        "following table",
        "```",
    };
    return phrases;
}

std::optional<RejectReason> chat_suitability_filter(const CorpusRecord& record,
                                                    const std::vector<std::string>& blocklist) {
    std::optional<std::string> normalized_text;  // computed lazily
    for (const std::string& phrase : blocklist) {
        const std::string normalized_phrase = normalize_text(phrase);
        if (normalized_phrase.empty()) {
            // Pure-punctuation markers (code fences) vanish under
            // normalization; match them literally against the raw text.
            if (record.text.find(phrase) != std::string::npos) {
                return RejectReason::chat_unsuitable;
            }
            continue;
        }
        if (!normalized_text) normalized_text = normalize_text(record.text);
        if (normalized_text->find(normalized_phrase) != std::string::npos) {
            return RejectReason::chat_unsuitable;
        }
    }
    return std::nullopt;
}

RoundtripResult roundtrip_verify(const CorpusRecord& record, TranscriberClient& client,
                                 const FilterConfig& cfg) {
    if (!record.audio_ref) {
        throw ValidationError("roundtrip_verify: record has no audio_ref");
    }
    const Transcript transcript = client.transcribe(*record.audio_ref, record.language);
    const Transcript source = Transcript::normalize(record.text);
    const bool use_cer = contains_cjk(record.text);

    RoundtripResult result;
    if (use_cer) {
        if (source.chars.empty()) return RoundtripResult{false, 1.0};
        result.rate = cer(source, transcript);
        result.accepted = result.rate <= cfg.cer_threshold;
    } else {
        if (source.words.empty()) return RoundtripResult{false, 1.0};
        result.rate = wer(source, transcript);
        result.accepted = result.rate <= cfg.wer_threshold;
    }
    return result;
}

PipelineResult run_pipeline(std::vector<CorpusRecord> records, const FilterConfig& cfg,
                            TranscriberClient* client, const std::vector<std::string>& blocklist,
                            RewriterClient* rewriter, unsigned threads) {
    detail::parallel_for(records.size(), threads, [&](std::size_t i) {
        CorpusRecord& record = records[i];
        record.cjk_classified = contains_cjk(record.text);

        std::optional<RejectReason> reason = length_filter(record, cfg);
        if (!reason) reason = nontext_ratio_filter(record, cfg);
        if (!reason) reason = pattern_filter(record);
        if (!reason) reason = chat_suitability_filter(record, blocklist);
        if (!reason && record.audio_ref && client != nullptr) {
            try {
                const RoundtripResult rt = roundtrip_verify(record, *client, cfg);
                record.rate = rt.rate;
                if (!rt.accepted) reason = RejectReason::roundtrip_failed;
            } catch (const RetryableError&) {
                record.verdict = Verdict::pending;
                return;
            }
        }

        if (reason) {
            record.verdict = Verdict::rejected;
            record.reject_reason = reason;
        } else {
            record.verdict = Verdict::accepted;
            record.reject_reason = std::nullopt;
            if (rewriter != nullptr) record.text = rewriter->rewrite(record.text);
        }
    });

    PipelineResult result;
    result.stats.total = records.size();
    for (CorpusRecord& record : records) {
        switch (record.verdict) {
            case Verdict::accepted:
                result.stats.accepted += 1;
                result.accepted.push_back(std::move(record));
                break;
            case Verdict::rejected:
                result.stats.rejected += 1;
                result.stats.rejected_by_reason[std::string(
                    reject_reason_name(*record.reject_reason))] += 1;
                result.rejected.push_back(std::move(record));
                break;
            case Verdict::pending:
                result.stats.retry_ids.push_back(record.id);
                result.pending.push_back(std::move(record));
                break;
        }
    }
    return result;
}

Transcript EchoTranscriber::transcribe(const std::string& audio_ref, Language) {
    return Transcript::normalize(audio_ref);
}

std::vector<CorpusRecord> read_records_jsonl(std::istream& in) {
    std::vector<CorpusRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
        CorpusRecord record;
        if (!doc.contains("id") || !doc.contains("text")) {
            throw FormatError("line " + std::to_string(line_no) +
                              ": record must contain 'id' and 'text'");
        }
        record.id = doc.at("id").get<std::string>();
        record.text = doc.at("text").get<std::string>();
        if (doc.contains("language") && !doc.at("language").is_null()) {
            record.language = language_from_name(doc.at("language").get<std::string>());
        }
        if (doc.contains("audio_ref") && !doc.at("audio_ref").is_null()) {
            record.audio_ref = doc.at("audio_ref").get<std::string>();
        }
        records.push_back(std::move(record));
    }
    return records;
}

void write_records_jsonl(std::ostream& out, const std::vector<CorpusRecord>& records) {
    for (const CorpusRecord& record : records) {
        nlohmann::ordered_json doc;
        doc["id"] = record.id;
        doc["text"] = record.text;
        doc["language"] = std::string(language_name(record.language));
        if (record.audio_ref) doc["audio_ref"] = *record.audio_ref;
        doc["classification"] = record.cjk_classified ? "zh" : "en";
        if (record.reject_reason) {
            doc["reject_reason"] = std::string(reject_reason_name(*record.reject_reason));
        }
        if (record.rate) doc["rate"] = *record.rate;
        out << doc.dump() << "\n";
    }
}

std::string stats_to_json(const PipelineStats& stats) {
    nlohmann::ordered_json doc;
    doc["total"] = stats.total;
    doc["accepted"] = stats.accepted;
    doc["rejected"] = stats.rejected;
    nlohmann::ordered_json by_reason = nlohmann::ordered_json::object();
    for (RejectReason reason :
         {RejectReason::length, RejectReason::nontext_ratio, RejectReason::pattern,
          RejectReason::chat_unsuitable, RejectReason::roundtrip_failed}) {
        const std::string name(reject_reason_name(reason));
        const auto it = stats.rejected_by_reason.find(name);
        by_reason[name] = it == stats.rejected_by_reason.end() ? 0 : it->second;
    }
    doc["rejected_by_reason"] = by_reason;
    doc["pending_retry"] = stats.retry_ids.size();
    doc["retry_ids"] = stats.retry_ids;
    return doc.dump(2) + "\n";
}

}  // namespace align
