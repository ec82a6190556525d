#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "align/emb_io.hpp"
#include "align/report.hpp"
#include "test_util.hpp"

using namespace align;

namespace {

// Builds a small on-disk dataset: text/vision/audio at layers 0 and 1,
// where audio is text plus small noise and vision is independent.
struct Dataset {
    std::filesystem::path dir;
    std::filesystem::path manifest;
};

Dataset make_dataset(const std::string& name, std::size_t n = 24, std::size_t d = 6) {
    Dataset ds;
    ds.dir = std::filesystem::temp_directory_path() / "align_report_test" / name;
    std::filesystem::create_directories(ds.dir);

    std::mt19937 rng(71);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::ostringstream entries;
    bool first = true;
    for (int layer = 0; layer < 2; ++layer) {
        // Text rows come in twin pairs so every sample has a mutual nearest
        // neighbor; the (text, text) self-pair then scores 1 on cycle_knn too.
        std::vector<double> text_values(n * d);
        for (std::size_t i = 0; i < n; i += 2) {
            for (std::size_t j = 0; j < d; ++j) {
                const double v = dist(rng);
                text_values[i * d + j] = v;
                if (i + 1 < n) text_values[(i + 1) * d + j] = v + 1e-3 * dist(rng);
            }
        }
        const EmbeddingMatrix text(n, d, std::move(text_values), Modality::text);
        std::vector<double> audio_values(n * d);
        for (std::size_t i = 0; i < n * d; ++i) {
            audio_values[i] = text.values()[i] + 0.2 * dist(rng);
        }
        const EmbeddingMatrix audio(n, d, std::move(audio_values), Modality::audio);
        const EmbeddingMatrix vision = testutil::random_matrix(rng, n, d, Modality::vision);

        for (const auto& [matrix, modality] :
             {std::pair{&text, "text"}, {&audio, "audio"}, {&vision, "vision"}}) {
            const std::string file =
                std::string(modality) + "_l" + std::to_string(layer) + ".emb1";
            write_embeddings_file(*matrix, ds.dir / file);
            if (!first) entries << ",";
            first = false;
            entries << R"({"path":")" << file << R"(","modality":")" << modality
                    << R"(","layer":)" << layer << "}";
        }
    }

    ds.manifest = ds.dir / "manifest.json";
    std::ofstream out(ds.manifest);
    out << R"({"sample_ids":[)";
    for (std::size_t i = 0; i < n; ++i) out << (i ? "," : "") << "\"s" << i << "\"";
    out << R"(],"entries":[)" << entries.str() << "]}";
    out.close();
    return ds;
}

}  // namespace

TEST_CASE("self-pair scores 1 on every metric") {
    const Dataset ds = make_dataset("self");
    const std::string config = R"({
        "metrics": ["cka","cknna","svcca","cycle_knn","mutual_knn","lcs_knn","edit_knn"],
        "k": 5,
        "pairs": [{"a": "text", "b": "text", "layer": 0}]
    })";
    const AlignmentReport report = run_alignment(parse_run_config(ds.manifest, config));
    REQUIRE(report.scores.size() == 7);
    for (const ScoreRow& row : report.scores) {
        const double expected = row.score.metric == Metric::lcs_knn ? 5.0 : 1.0;
        CHECK(std::abs(row.score.value - expected) <= 1e-6);
    }
    REQUIRE(report.aggregates.size() == 1);
    CHECK(std::abs(report.aggregates[0].value - 1.0) <= 1e-6);
}

TEST_CASE("aggregate of a singleton metric set equals that metric") {
    const Dataset ds = make_dataset("singleton");
    const std::string config = R"({
        "metrics": ["cka"],
        "pairs": [{"a": "audio", "b": "text", "layer": 0}]
    })";
    const AlignmentReport report = run_alignment(parse_run_config(ds.manifest, config));
    REQUIRE(report.scores.size() == 1);
    CHECK(report.aggregates[0].value == report.scores[0].score.value);
}

TEST_CASE("aggregate is the mean of normalized scores and is order-independent") {
    const Dataset ds = make_dataset("aggregate");
    const std::string base = R"({
        "metrics": ["lcs_knn","cka","mutual_knn"],
        "k": 4,
        "pairs": [{"a": "audio", "b": "text", "layer": 1}]
    })";
    const std::string shuffled = R"({
        "metrics": ["cka","mutual_knn","lcs_knn"],
        "k": 4,
        "pairs": [{"a": "audio", "b": "text", "layer": 1}]
    })";
    const AlignmentReport r1 = run_alignment(parse_run_config(ds.manifest, base));
    const AlignmentReport r2 = run_alignment(parse_run_config(ds.manifest, shuffled));
    CHECK(r1.aggregates[0].value == r2.aggregates[0].value);

    double mean = 0.0;
    for (const ScoreRow& row : r1.scores) {
        mean += row.score.metric == Metric::lcs_knn ? row.score.value / 4.0 : row.score.value;
    }
    mean /= 3.0;
    CHECK(r1.aggregates[0].value == doctest::Approx(mean).epsilon(1e-12));

    // Removing a metric leaves the mean of the remaining normalized scores.
    const std::string reduced = R"({
        "metrics": ["cka","mutual_knn"],
        "k": 4,
        "pairs": [{"a": "audio", "b": "text", "layer": 1}]
    })";
    const AlignmentReport r3 = run_alignment(parse_run_config(ds.manifest, reduced));
    double reduced_mean = 0.0;
    for (const ScoreRow& row : r1.scores) {
        if (row.score.metric != Metric::lcs_knn) reduced_mean += row.score.value;
    }
    reduced_mean /= 2.0;
    CHECK(r3.aggregates[0].value == doctest::Approx(reduced_mean).epsilon(1e-12));
}

TEST_CASE("fusion expressions resolve through concat_fuse") {
    const Dataset ds = make_dataset("fusion");
    const std::string config = R"({
        "metrics": ["cka"],
        "pairs": [
            {"a": "vision+audio", "b": "text", "layer": 0},
            {"a": "vision", "b": "text", "layer": 0}
        ]
    })";
    const AlignmentReport report = run_alignment(parse_run_config(ds.manifest, config));
    REQUIRE(report.aggregates.size() == 2);
    double fused = 0.0, vision_only = 0.0;
    for (const AggregateRow& row : report.aggregates) {
        if (row.pair == "vision+audio|text") fused = row.value;
        if (row.pair == "vision|text") vision_only = row.value;
    }
    CHECK(fused > vision_only);
}

TEST_CASE("layer ranges expand to per-layer rows") {
    const Dataset ds = make_dataset("layers");
    const std::string config = R"({
        "metrics": ["cka","svcca"],
        "pairs": [{"a": "audio", "b": "text", "layers": [0, 1]}]
    })";
    const RunConfig cfg = parse_run_config(ds.manifest, config);
    REQUIRE(cfg.pairs.size() == 2);
    const AlignmentReport report = run_alignment(cfg);
    CHECK(report.scores.size() == 4);
    CHECK(report.aggregates.size() == 2);
    CHECK(report.aggregates[0].layer == 0);
    CHECK(report.aggregates[1].layer == 1);
}

TEST_CASE("config and selector errors") {
    const Dataset ds = make_dataset("errors");
    CHECK_THROWS_AS(parse_run_config(ds.manifest, "{"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(ds.manifest, R"({"pairs":[]})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(ds.manifest, R"({"metrics":[],"pairs":[{"a":"text","b":"text"}]})"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_run_config(ds.manifest, R"({"metrics":["nope"],"pairs":[{"a":"a","b":"b"}]})"),
        ConfigError);

    // Unresolvable selector: layer 9 does not exist.
    const RunConfig missing = parse_run_config(
        ds.manifest, R"({"metrics":["cka"],"pairs":[{"a":"text","b":"vision","layer":9}]})");
    CHECK_THROWS_AS(run_alignment(missing), ConfigError);

    // Unknown modality term inside a fusion expression.
    const RunConfig bad_term = parse_run_config(
        ds.manifest, R"({"metrics":["cka"],"pairs":[{"a":"vision+sound","b":"text","layer":0}]})");
    CHECK_THROWS_AS(run_alignment(bad_term), ConfigError);
}

TEST_CASE("emitters") {
    const Dataset ds = make_dataset("emit");
    const std::string config = R"({
        "metrics": ["cka","lcs_knn"],
        "k": 3,
        "pairs": [
            {"a": "audio", "b": "text", "layers": [0, 1]},
            {"a": "vision", "b": "text", "layers": [0, 1]}
        ]
    })";
    const RunConfig cfg = parse_run_config(ds.manifest, config);
    const AlignmentReport report = run_alignment(cfg);

    SUBCASE("csv shape and ordering") {
        const std::string csv = emit_csv(report);
        std::istringstream lines(csv);
        std::string line;
        std::getline(lines, line);
        CHECK(line == "pair,layer,metric,value,k,degenerate");
        std::vector<std::string> rest;
        while (std::getline(lines, line)) rest.push_back(line);
        // 2 pairs x 2 layers x (2 metrics + aggregate)
        CHECK(rest.size() == 12);
        CHECK(std::is_sorted(rest.begin(), rest.end()));
        bool has_aggregate = false;
        for (const auto& l : rest) has_aggregate |= l.find(",aggregate,") != std::string::npos;
        CHECK(has_aggregate);
    }

    SUBCASE("json round trip preserves values exactly") {
        const std::string json_text = emit_json(report);
        const AlignmentReport loaded = load_report_json(json_text);
        CHECK(emit_json(loaded) == json_text);
        REQUIRE(loaded.scores.size() == report.scores.size());
        CHECK(loaded.k == report.k);
        CHECK(loaded.normalize.l2_before_knn == report.normalize.l2_before_knn);
    }

    SUBCASE("determinism across repeated runs and thread counts") {
        RunConfig threaded = cfg;
        threaded.threads = 4;
        const AlignmentReport again = run_alignment(cfg);
        const AlignmentReport parallel = run_alignment(threaded);
        CHECK(emit_json(report) == emit_json(again));
        CHECK(emit_json(report) == emit_json(parallel));
        CHECK(emit_csv(report) == emit_csv(parallel));
    }

    SUBCASE("empty report emits a header-only csv") {
        AlignmentReport empty;
        empty.metrics = {Metric::cka};
        CHECK(emit_csv(empty) == "pair,layer,metric,value,k,degenerate\n");
    }
}

TEST_CASE("svg bars") {
    const Dataset ds = make_dataset("svg");
    const std::string config = R"({
        "metrics": ["cka"],
        "pairs": [
            {"a": "audio", "b": "text", "layers": [0, 1]},
            {"a": "vision", "b": "text", "layers": [0, 1]},
            {"a": "text", "b": "text", "layers": [0, 1]}
        ]
    })";
    const AlignmentReport report = run_alignment(parse_run_config(ds.manifest, config));

    SUBCASE("bar count is pairs x layers") {
        const std::string svg = emit_svg_bars(report);
        std::size_t bars = 0, pos = 0;
        while ((pos = svg.find("class=\"bar\"", pos)) != std::string::npos) {
            ++bars;
            ++pos;
        }
        CHECK(bars == 6);
        CHECK(svg.find("<svg") == 0);
        CHECK(svg.find("</svg>") != std::string::npos);
    }

    SUBCASE("3 pairs across 28 layers yields 84 bars in 28 groups") {
        AlignmentReport wide;
        wide.metrics = {Metric::cka};
        for (int layer = 0; layer < 28; ++layer) {
            for (const char* pair : {"a|t", "b|t", "c|t"}) {
                wide.aggregates.push_back(
                    AggregateRow{pair, layer, 0.5 + 0.01 * layer});
            }
        }
        const std::string svg = emit_svg_bars(wide);
        std::size_t bars = 0, pos = 0;
        while ((pos = svg.find("class=\"bar\"", pos)) != std::string::npos) {
            ++bars;
            ++pos;
        }
        CHECK(bars == 84);
        std::size_t last_group = 0;
        pos = 0;
        while ((pos = svg.find("data-layer=\"27\"", pos)) != std::string::npos) {
            ++last_group;
            ++pos;
        }
        CHECK(last_group == 3);  // one bar per pair in the final group
    }

    SUBCASE("single pair and layer yields one bar with proportional height") {
        AlignmentReport small;
        small.metrics = {Metric::cka};
        small.aggregates.push_back(AggregateRow{"a|b", 0, 0.5});
        const std::string svg = emit_svg_bars(small);
        CHECK(svg.find("data-value=\"0.5\"") != std::string::npos);
        CHECK(svg.find("height=\"120\"") != std::string::npos);  // 0.5 of 240
    }

    SUBCASE("equal aggregates yield equal bar heights") {
        AlignmentReport flat;
        flat.metrics = {Metric::cka};
        flat.aggregates.push_back(AggregateRow{"a|b", 0, 0.75});
        flat.aggregates.push_back(AggregateRow{"c|d", 0, 0.75});
        const std::string svg = emit_svg_bars(flat);
        std::size_t count = 0, pos = 0;
        while ((pos = svg.find("height=\"180\"", pos)) != std::string::npos) {
            ++count;
            ++pos;
        }
        CHECK(count == 2);
    }

    SUBCASE("missing aggregate for a selected pair is an error") {
        AlignmentReport partial;
        partial.metrics = {Metric::cka};
        partial.aggregates.push_back(AggregateRow{"a|b", 0, 0.5});
        partial.aggregates.push_back(AggregateRow{"c|d", 1, 0.5});
        CHECK_THROWS_AS(emit_svg_bars(partial), ConfigError);
    }
}
