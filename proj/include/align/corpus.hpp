#pragma once

#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "align/common.hpp"
#include "align/textnorm.hpp"

namespace align {

enum class Language { zh, en, mixed };
std::string_view language_name(Language lang);
Language language_from_name(std::string_view name);

enum class Verdict { pending, accepted, rejected };

enum class RejectReason { length, nontext_ratio, pattern, chat_unsuitable, roundtrip_failed };
std::string_view reject_reason_name(RejectReason reason);

// One text flowing through the filter pipeline. `cjk_classified` records the
// per-record language decision: a record counts as Chinese iff it contains
// at least one CJK Unified Ideograph, and then uses the Chinese length rule
// and CER verification regardless of the declared language.
struct CorpusRecord {
    std::string id;
    std::string text;
    Language language = Language::en;
    std::optional<std::string> audio_ref;

    Verdict verdict = Verdict::pending;
    std::optional<RejectReason> reject_reason;
    std::optional<double> rate;  // measured CER/WER from round-trip verification
    bool cjk_classified = false;
};

struct FilterConfig {
    int max_zh_chars = 200;
    int max_en_words = 200;
    double max_nontext_ratio = 0.2;
    double cer_threshold = 0.05;
    double wer_threshold = 0.10;
    double timeout_seconds = 30.0;
};

// Pluggable speech-to-text client used by round-trip verification.
// Implementations raise RetryableError on timeout or transport failure; the
// record then stays pending and lands in the retry queue.
class TranscriberClient {
public:
    virtual ~TranscriberClient() = default;
    virtual Transcript transcribe(const std::string& audio_ref, Language language) = 0;
};

// Mock: the audio_ref string is taken to be the spoken content, so the
// transcript is the audio_ref itself. Deterministic per audio_ref.
class EchoTranscriber : public TranscriberClient {
public:
    Transcript transcribe(const std::string& audio_ref, Language language) override;
};

// POSTs {"audio_ref": ..., "language": ...} as JSON to the configured
// endpoint and expects {"text": ...} back.
class HttpTranscriber : public TranscriberClient {
public:
    // url: http://host:port/path
    explicit HttpTranscriber(std::string url, double timeout_seconds = 30.0);
    Transcript transcribe(const std::string& audio_ref, Language language) override;

private:
    std::string host_;
    int port_ = 80;
    std::string path_;
    double timeout_seconds_;
};

// Seam for conversational rewriting of accepted queries. Generation itself
// is out of scope; the default passthrough leaves text untouched.
class RewriterClient {
public:
    virtual ~RewriterClient() = default;
    virtual std::string rewrite(const std::string& text) = 0;
};

class PassthroughRewriter : public RewriterClient {
public:
    std::string rewrite(const std::string& text) override { return text; }
};

// Individual rules. Each returns the reject reason it would assign, or
// nullopt to pass the record on.
std::optional<RejectReason> length_filter(const CorpusRecord& record, const FilterConfig& cfg);
std::optional<RejectReason> nontext_ratio_filter(const CorpusRecord& record,
                                                 const FilterConfig& cfg);
std::optional<RejectReason> pattern_filter(const CorpusRecord& record);
std::optional<RejectReason> chat_suitability_filter(const CorpusRecord& record,
                                                    const std::vector<std::string>& blocklist);

// Referential phrases and code-fence markers unsuitable for spoken chat.
const std::vector<std::string>& default_blocklist();

struct RoundtripResult {
    bool accepted = false;
    double rate = 0.0;
};

// Transcribes the record's audio and accepts when the transcript
// approximately recovers the source text: CER <= cer_threshold for
// CJK-classified records, WER <= wer_threshold otherwise.
RoundtripResult roundtrip_verify(const CorpusRecord& record, TranscriberClient& client,
                                 const FilterConfig& cfg);

struct PipelineStats {
    std::size_t total = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::map<std::string, std::size_t> rejected_by_reason;
    std::vector<std::string> retry_ids;  // records left pending by transient failures
};

struct PipelineResult {
    std::vector<CorpusRecord> accepted;
    std::vector<CorpusRecord> rejected;
    std::vector<CorpusRecord> pending;
    PipelineStats stats;
};

// Applies the rules in fixed order (length, nontext_ratio, pattern, chat,
// then round-trip when an audio_ref is present and a client is supplied);
// the first failing rule sets the reason. Output order equals input order
// for any thread count. A null client skips round-trip verification.
PipelineResult run_pipeline(std::vector<CorpusRecord> records, const FilterConfig& cfg,
                            TranscriberClient* client, const std::vector<std::string>& blocklist,
                            RewriterClient* rewriter = nullptr, unsigned threads = 1);

// JSON-lines I/O. Input: {"id", "text", "language", "audio_ref"?}. Output
// mirrors the input plus "classification" and, where measured, "rate";
// rejected records additionally carry "reject_reason".
std::vector<CorpusRecord> read_records_jsonl(std::istream& in);
void write_records_jsonl(std::ostream& out, const std::vector<CorpusRecord>& records);
std::string stats_to_json(const PipelineStats& stats);

}  // namespace align
