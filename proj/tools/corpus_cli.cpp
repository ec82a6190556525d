// corpus — filtering pipeline for speech-synthesis text corpora.
//
//   corpus filter --in records.jsonl --out-dir D --config F.json
//                 [--transcriber mock|http://host:port/path] [--threads N]
//
// Writes accepted.jsonl, rejected.jsonl, and stats.json into the output
// directory. Exit codes: 0 success, 1 validation/config error, 2 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "align/corpus.hpp"

namespace {

align::FilterConfig load_filter_config(const std::string& path,
                                       std::vector<std::string>& blocklist) {
    align::FilterConfig cfg;
    if (path.empty()) {
        blocklist = align::default_blocklist();
        return cfg;
    }
    std::ifstream in(path);
    if (!in) {
        throw align::IoError("cannot open filter config: " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw align::ConfigError("filter config is not valid JSON: " + std::string(e.what()));
    }
    if (doc.contains("max_zh_chars")) cfg.max_zh_chars = doc.at("max_zh_chars").get<int>();
    if (doc.contains("max_en_words")) cfg.max_en_words = doc.at("max_en_words").get<int>();
    if (doc.contains("max_nontext_ratio")) {
        cfg.max_nontext_ratio = doc.at("max_nontext_ratio").get<double>();
    }
    if (doc.contains("cer_threshold")) cfg.cer_threshold = doc.at("cer_threshold").get<double>();
    if (doc.contains("wer_threshold")) cfg.wer_threshold = doc.at("wer_threshold").get<double>();
    if (doc.contains("timeout_seconds")) {
        cfg.timeout_seconds = doc.at("timeout_seconds").get<double>();
    }
    if (cfg.max_zh_chars <= 0 || cfg.max_en_words <= 0 || cfg.max_nontext_ratio <= 0.0 ||
        cfg.max_nontext_ratio > 1.0 || cfg.cer_threshold <= 0.0 || cfg.cer_threshold > 1.0 ||
        cfg.wer_threshold <= 0.0 || cfg.wer_threshold > 1.0) {
        throw align::ConfigError("filter thresholds out of range");
    }
    if (doc.contains("blocklist")) {
        for (const auto& phrase : doc.at("blocklist")) {
            blocklist.push_back(phrase.get<std::string>());
        }
    } else {
        blocklist = align::default_blocklist();
    }
    return cfg;
}

int filter_command(const std::string& in_path, const std::string& out_dir,
                   const std::string& config_path, const std::string& transcriber, int threads) {
    std::vector<std::string> blocklist;
    const align::FilterConfig cfg = load_filter_config(config_path, blocklist);

    std::ifstream in(in_path);
    if (!in) {
        throw align::IoError("cannot open input records: " + in_path);
    }
    std::vector<align::CorpusRecord> records = align::read_records_jsonl(in);

    std::unique_ptr<align::TranscriberClient> client;
    if (transcriber == "mock") {
        client = std::make_unique<align::EchoTranscriber>();
    } else if (!transcriber.empty()) {
        client = std::make_unique<align::HttpTranscriber>(transcriber, cfg.timeout_seconds);
    }

    const align::PipelineResult result =
        align::run_pipeline(std::move(records), cfg, client.get(), blocklist, nullptr,
                            threads > 0 ? static_cast<unsigned>(threads) : 1);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    auto open_out = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) {
            throw align::IoError("cannot open for writing: " + (dir / name).string());
        }
        return out;
    };
    {
        std::ofstream out = open_out("accepted.jsonl");
        align::write_records_jsonl(out, result.accepted);
    }
    {
        std::ofstream out = open_out("rejected.jsonl");
        align::write_records_jsonl(out, result.rejected);
    }
    {
        std::ofstream out = open_out("stats.json");
        out << align::stats_to_json(result.stats);
    }

    std::cout << result.stats.accepted << " accepted, " << result.stats.rejected << " rejected, "
              << result.stats.retry_ids.size() << " pending retry\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"speech-corpus filtering pipeline"};
    app.require_subcommand(1);

    std::string in_path, out_dir, config_path, transcriber;
    int threads = 1;
    CLI::App* filter = app.add_subcommand("filter", "run the filter pipeline over JSONL records");
    filter->add_option("--in", in_path, "input records.jsonl")->required();
    filter->add_option("--out-dir", out_dir, "output directory")->required();
    filter->add_option("--config", config_path, "filter config JSON (default thresholds if omitted)");
    filter->add_option("--transcriber", transcriber,
                       "round-trip verifier: 'mock' or http://host:port/path");
    filter->add_option("--threads", threads, "worker threads");

    try {
        app.parse(argc, argv);
        return filter_command(in_path, out_dir, config_path, transcriber, threads);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const align::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const align::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
