#include "align/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "align/emb_io.hpp"
#include "align/kernel.hpp"
#include "align/neighbors.hpp"
#include "align/pool.hpp"
#include "internal.hpp"

namespace align {

namespace {

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Rounds through the 12-significant-digit decimal representation so that
// serialized values are identical across runs and worker counts.
double round_12(double v) {
    return std::strtod(format_value(v).c_str(), nullptr);
}

bool has_metric(const std::vector<Metric>& metrics, Metric m) {
    return std::find(metrics.begin(), metrics.end(), m) != metrics.end();
}

std::vector<std::string> split_expression(const std::string& expression) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(expression);
    while (std::getline(in, part, '+')) {
        // trim surrounding spaces
        const auto first = part.find_first_not_of(' ');
        const auto last = part.find_last_not_of(' ');
        if (first == std::string::npos) {
            throw ConfigError("empty term in fusion expression: " + expression);
        }
        parts.push_back(part.substr(first, last - first + 1));
    }
    if (parts.empty()) {
        throw ConfigError("empty space expression");
    }
    return parts;
}

std::string layer_suffix(const std::optional<int>& layer) {
    return layer ? "@" + std::to_string(*layer) : std::string();
}

}  // namespace

std::string SpaceSelector::label() const { return expression + layer_suffix(layer); }

std::string PairSpec::label() const {
    if (a.layer == b.layer) {
        return a.expression + "|" + b.expression;
    }
    return a.label() + "|" + b.label();
}

std::optional<int> PairSpec::common_layer() const {
    if (a.layer == b.layer) return a.layer;
    return std::nullopt;
}

namespace {

SpaceSelector parse_selector(const nlohmann::json& node) {
    SpaceSelector sel;
    if (node.is_string()) {
        sel.expression = node.get<std::string>();
        return sel;
    }
    if (node.is_object() && node.contains("space")) {
        sel.expression = node.at("space").get<std::string>();
        if (node.contains("layer") && !node.at("layer").is_null()) {
            sel.layer = node.at("layer").get<int>();
        }
        return sel;
    }
    throw ConfigError("selector must be a string or {\"space\", \"layer\"} object");
}

}  // namespace

RunConfig parse_run_config(const std::filesystem::path& manifest_path,
                           const std::string& config_json) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("run config is not valid JSON: " + std::string(e.what()));
    }

    RunConfig cfg;
    cfg.manifest_path = manifest_path;

    if (doc.contains("metrics")) {
        for (const auto& name : doc.at("metrics")) {
            try {
                cfg.metrics.push_back(metric_from_name(name.get<std::string>()));
            } catch (const ValidationError& e) {
                throw ConfigError(e.what());
            }
        }
    } else {
        cfg.metrics.assign(std::begin(kAllMetrics), std::end(kAllMetrics));
    }
    if (cfg.metrics.empty()) {
        throw ConfigError("metric set must be non-empty");
    }

    if (doc.contains("k")) cfg.k = doc.at("k").get<int>();
    if (cfg.k < 1) throw ConfigError("k must be >= 1");

    if (doc.contains("svcca")) {
        const auto& s = doc.at("svcca");
        if (s.contains("energy_threshold")) {
            cfg.svcca.energy_threshold = s.at("energy_threshold").get<double>();
        }
        if (s.contains("ridge")) cfg.svcca.ridge = s.at("ridge").get<double>();
    }
    if (doc.contains("normalize")) {
        const auto& n = doc.at("normalize");
        if (n.contains("l2_before_knn")) {
            cfg.normalize.l2_before_knn = n.at("l2_before_knn").get<bool>();
        }
        if (n.contains("renormalize_after_fusion")) {
            cfg.normalize.renormalize_after_fusion = n.at("renormalize_after_fusion").get<bool>();
        }
    }
    if (doc.contains("threads")) {
        const int t = doc.at("threads").get<int>();
        if (t < 1) throw ConfigError("threads must be >= 1");
        cfg.threads = static_cast<unsigned>(t);
    }

    if (!doc.contains("pairs") || !doc.at("pairs").is_array() || doc.at("pairs").empty()) {
        throw ConfigError("run config must list at least one pair");
    }
    for (const auto& node : doc.at("pairs")) {
        if (!node.is_object() || !node.contains("a") || !node.contains("b")) {
            throw ConfigError("pair must contain 'a' and 'b'");
        }
        SpaceSelector a = parse_selector(node.at("a"));
        SpaceSelector b = parse_selector(node.at("b"));

        const bool side_layers = a.layer.has_value() || b.layer.has_value();
        if (node.contains("layer") && !node.at("layer").is_null()) {
            if (side_layers) {
                throw ConfigError("pair-level 'layer' cannot be combined with side-level layers");
            }
            a.layer = b.layer = node.at("layer").get<int>();
            cfg.pairs.push_back(PairSpec{a, b});
        } else if (node.contains("layers") && !node.at("layers").is_null()) {
            if (side_layers) {
                throw ConfigError("pair-level 'layers' cannot be combined with side-level layers");
            }
            const auto& range = node.at("layers");
            if (!range.is_array() || range.size() != 2) {
                throw ConfigError("'layers' must be an inclusive [lo, hi] pair");
            }
            const int lo = range.at(0).get<int>();
            const int hi = range.at(1).get<int>();
            if (hi < lo) throw ConfigError("'layers' range is reversed");
            for (int layer = lo; layer <= hi; ++layer) {
                SpaceSelector la = a, lb = b;
                la.layer = lb.layer = layer;
                cfg.pairs.push_back(PairSpec{la, lb});
            }
        } else {
            cfg.pairs.push_back(PairSpec{a, b});
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& manifest_path,
                          const std::filesystem::path& config_path) {
    std::ifstream in(config_path);
    if (!in) {
        throw IoError("cannot open run config: " + config_path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(manifest_path, buf.str());
}

namespace {

// Everything derivable from one resolved representation, computed once and
// shared by all pairs that reference it.
struct SpaceDerived {
    EmbeddingMatrix repr;
    std::optional<KernelMatrix> kernel;
    std::optional<NeighborList> nn;
    std::optional<EmbeddingMatrix> reduced;
};

EmbeddingMatrix resolve_space(const DatasetManifest& manifest, const SpaceSelector& selector,
                              const NormalizationFlags& normalize,
                              std::map<std::string, EmbeddingMatrix>& file_cache) {
    const std::vector<std::string> parts = split_expression(selector.expression);

    std::optional<EmbeddingMatrix> result;
    for (const std::string& part : parts) {
        Modality modality;
        try {
            modality = modality_from_name(part);
        } catch (const ValidationError&) {
            throw ConfigError("selector term is not a modality: " + part);
        }
        const ManifestEntry* entry = manifest.find(modality, selector.layer);
        if (entry == nullptr) {
            throw ConfigError("selector " + selector.label() + " not present in manifest");
        }
        const std::string key = entry->path.string();
        auto it = file_cache.find(key);
        if (it == file_cache.end()) {
            it = file_cache.emplace(key, load_entry(manifest, *entry)).first;
        }
        EmbeddingMatrix loaded = it->second;
        loaded.modality = modality;
        loaded.layer = selector.layer;
        result = result ? concat_fuse(*result, loaded) : std::move(loaded);
    }
    if (parts.size() > 1 && normalize.renormalize_after_fusion) {
        result = l2_normalize_rows(*result).matrix;
    }
    return *result;
}

double normalized_value(const AlignmentScore& score, int k) {
    if (score.metric == Metric::lcs_knn) {
        return score.value / static_cast<double>(k);
    }
    return score.value;
}

}  // namespace

AlignmentReport run_alignment(const RunConfig& cfg) {
    if (cfg.metrics.empty()) {
        throw ConfigError("metric set must be non-empty");
    }
    const DatasetManifest manifest = load_manifest(cfg.manifest_path);

    // Distinct selectors, in first-appearance order.
    std::vector<SpaceSelector> selectors;
    std::map<std::string, std::size_t> selector_index;
    auto intern = [&](const SpaceSelector& sel) {
        const std::string key = sel.label();
        auto it = selector_index.find(key);
        if (it != selector_index.end()) return it->second;
        selectors.push_back(sel);
        selector_index.emplace(key, selectors.size() - 1);
        return selectors.size() - 1;
    };
    struct PairTask {
        std::size_t a;
        std::size_t b;
        std::string label;
        std::optional<int> layer;
    };
    std::vector<PairTask> tasks;
    for (const PairSpec& pair : cfg.pairs) {
        tasks.push_back(PairTask{intern(pair.a), intern(pair.b), pair.label(),
                                 pair.common_layer()});
    }

    // Load and fuse every distinct space (I/O-bound, serial).
    std::map<std::string, EmbeddingMatrix> file_cache;
    std::vector<SpaceDerived> spaces;
    spaces.reserve(selectors.size());
    for (const SpaceSelector& sel : selectors) {
        spaces.push_back(SpaceDerived{
            resolve_space(manifest, sel, cfg.normalize, file_cache), {}, {}, {}});
    }
    file_cache.clear();

    for (const PairTask& task : tasks) {
        if (spaces[task.a].repr.n_samples() != spaces[task.b].repr.n_samples()) {
            throw ValidationError("pair " + task.label + ": sample counts differ");
        }
    }

    const bool need_kernel = has_metric(cfg.metrics, Metric::cka) ||
                             has_metric(cfg.metrics, Metric::cknna);
    const bool need_nn = has_metric(cfg.metrics, Metric::cycle_knn) ||
                         has_metric(cfg.metrics, Metric::mutual_knn) ||
                         has_metric(cfg.metrics, Metric::lcs_knn) ||
                         has_metric(cfg.metrics, Metric::edit_knn);
    const bool need_reduced = has_metric(cfg.metrics, Metric::svcca);

    // Heavy per-space products, parallel over spaces; leftover workers go to
    // the row-parallel kNN construction inside each space.
    const unsigned nested_threads = std::max(
        1u, cfg.threads / static_cast<unsigned>(std::min<std::size_t>(spaces.size(),
                                                                      cfg.threads)));
    detail::parallel_for(spaces.size(), cfg.threads, [&](std::size_t i) {
        SpaceDerived& space = spaces[i];
        const std::size_t n = space.repr.n_samples();
        if (n < 2) {
            throw ValidationError("metrics require n_samples >= 2");
        }
        if (need_nn) {
            if (static_cast<std::size_t>(cfg.k) > n - 1) {
                throw ValidationError("k=" + std::to_string(cfg.k) +
                                      " exceeds n-1 for a space of " + std::to_string(n) +
                                      " samples");
            }
            const std::size_t k = static_cast<std::size_t>(cfg.k);
            space.nn = cfg.normalize.l2_before_knn
                           ? knn(space.repr, k, nested_threads)
                           : knn_inner_product(space.repr, k, nested_threads);
        }
        if (need_kernel) space.kernel = gram(space.repr);
        if (need_reduced) space.reduced = svd_reduce(space.repr, cfg.svcca);
    });

    AlignmentReport report;
    report.metrics = cfg.metrics;
    report.k = cfg.k;
    report.svcca = cfg.svcca;
    report.normalize = cfg.normalize;

    // Score every (pair, metric); tasks are independent.
    std::vector<std::vector<AlignmentScore>> task_scores(tasks.size());
    detail::parallel_for(tasks.size(), cfg.threads, [&](std::size_t t) {
        const PairTask& task = tasks[t];
        const SpaceDerived& sa = spaces[task.a];
        const SpaceDerived& sb = spaces[task.b];
        std::vector<AlignmentScore>& out = task_scores[t];
        out.reserve(cfg.metrics.size());
        for (Metric metric : cfg.metrics) {
            switch (metric) {
                case Metric::cka:
                    out.push_back(cka_from_kernels(*sa.kernel, *sb.kernel));
                    break;
                case Metric::cknna:
                    out.push_back(cknna_from_kernels(*sa.kernel, *sb.kernel, cfg.k));
                    break;
                case Metric::svcca: {
                    const std::vector<double> rho =
                        cca_correlations(*sa.reduced, *sb.reduced, cfg.svcca);
                    double sum = 0.0;
                    for (double r : rho) sum += r;
                    const double value =
                        rho.empty() ? 0.0 : sum / static_cast<double>(rho.size());
                    out.push_back(AlignmentScore{Metric::svcca, value, std::nullopt, false});
                    break;
                }
                case Metric::cycle_knn:
                    out.push_back(cycle_knn(*sa.nn, *sb.nn));
                    break;
                case Metric::mutual_knn:
                    out.push_back(mutual_knn(*sa.nn, *sb.nn));
                    break;
                case Metric::lcs_knn:
                    out.push_back(lcs_knn(*sa.nn, *sb.nn));
                    break;
                case Metric::edit_knn:
                    out.push_back(edit_knn(*sa.nn, *sb.nn));
                    break;
            }
        }
    });

    for (std::size_t t = 0; t < tasks.size(); ++t) {
        for (const AlignmentScore& score : task_scores[t]) {
            report.scores.push_back(ScoreRow{tasks[t].label, tasks[t].layer, score});
        }
        // Sum in canonical metric order so the aggregate is exactly invariant
        // to permutations of the configured metric list.
        double sum = 0.0;
        for (Metric metric : kAllMetrics) {
            for (const AlignmentScore& score : task_scores[t]) {
                if (score.metric == metric) sum += normalized_value(score, cfg.k);
            }
        }
        report.aggregates.push_back(AggregateRow{
            tasks[t].label, tasks[t].layer,
            sum / static_cast<double>(task_scores[t].size())});
    }
    return report;
}

namespace {

// Tuple ordering used by both emitters: pair, then layer (absent first),
// then metric name.
bool layer_less(const std::optional<int>& a, const std::optional<int>& b) {
    if (a.has_value() != b.has_value()) return !a.has_value();
    if (!a.has_value()) return false;
    return *a < *b;
}

std::vector<ScoreRow> sorted_scores(const AlignmentReport& report) {
    std::vector<ScoreRow> rows = report.scores;
    std::stable_sort(rows.begin(), rows.end(), [](const ScoreRow& x, const ScoreRow& y) {
        if (x.pair != y.pair) return x.pair < y.pair;
        if (x.layer != y.layer) return layer_less(x.layer, y.layer);
        return metric_name(x.score.metric) < metric_name(y.score.metric);
    });
    return rows;
}

std::vector<AggregateRow> sorted_aggregates(const AlignmentReport& report) {
    std::vector<AggregateRow> rows = report.aggregates;
    std::stable_sort(rows.begin(), rows.end(), [](const AggregateRow& x, const AggregateRow& y) {
        if (x.pair != y.pair) return x.pair < y.pair;
        return layer_less(x.layer, y.layer);
    });
    return rows;
}

}  // namespace

std::string emit_csv(const AlignmentReport& report) {
    std::ostringstream out;
    out << "pair,layer,metric,value,k,degenerate\n";

    struct Line {
        std::string pair;
        std::optional<int> layer;
        std::string metric;
        std::string value;
        std::string k;
        bool degenerate;
    };
    std::vector<Line> lines;
    for (const ScoreRow& row : sorted_scores(report)) {
        lines.push_back(Line{row.pair, row.layer, std::string(metric_name(row.score.metric)),
                             format_value(round_12(row.score.value)),
                             row.score.k ? std::to_string(*row.score.k) : std::string(),
                             row.score.degenerate});
    }
    for (const AggregateRow& row : sorted_aggregates(report)) {
        lines.push_back(Line{row.pair, row.layer, "aggregate",
                             format_value(round_12(row.value)), std::string(), false});
    }
    std::stable_sort(lines.begin(), lines.end(), [](const Line& x, const Line& y) {
        if (x.pair != y.pair) return x.pair < y.pair;
        if (x.layer != y.layer) return layer_less(x.layer, y.layer);
        return x.metric < y.metric;
    });

    for (const Line& line : lines) {
        out << line.pair << ',' << (line.layer ? std::to_string(*line.layer) : std::string())
            << ',' << line.metric << ',' << line.value << ',' << line.k << ','
            << (line.degenerate ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string emit_json(const AlignmentReport& report) {
    nlohmann::ordered_json doc;

    nlohmann::ordered_json metadata;
    metadata["tool_version"] = report.tool_version;
    nlohmann::ordered_json metric_names = nlohmann::ordered_json::array();
    for (Metric m : report.metrics) metric_names.push_back(std::string(metric_name(m)));
    metadata["metrics"] = metric_names;
    metadata["k"] = report.k;
    metadata["svcca"] = {{"energy_threshold", round_12(report.svcca.energy_threshold)},
                         {"ridge", round_12(report.svcca.ridge)}};
    metadata["normalize"] = {{"l2_before_knn", report.normalize.l2_before_knn},
                             {"renormalize_after_fusion", report.normalize.renormalize_after_fusion}};
    doc["metadata"] = metadata;

    nlohmann::ordered_json scores = nlohmann::ordered_json::array();
    for (const ScoreRow& row : sorted_scores(report)) {
        nlohmann::ordered_json item;
        item["pair"] = row.pair;
        item["layer"] = row.layer ? nlohmann::ordered_json(*row.layer)
                                  : nlohmann::ordered_json(nullptr);
        item["metric"] = std::string(metric_name(row.score.metric));
        item["value"] = round_12(row.score.value);
        item["k"] = row.score.k ? nlohmann::ordered_json(*row.score.k)
                                : nlohmann::ordered_json(nullptr);
        item["degenerate"] = row.score.degenerate;
        scores.push_back(item);
    }
    doc["scores"] = scores;

    nlohmann::ordered_json aggregates = nlohmann::ordered_json::array();
    for (const AggregateRow& row : sorted_aggregates(report)) {
        nlohmann::ordered_json item;
        item["pair"] = row.pair;
        item["layer"] = row.layer ? nlohmann::ordered_json(*row.layer)
                                  : nlohmann::ordered_json(nullptr);
        item["value"] = round_12(row.value);
        aggregates.push_back(item);
    }
    doc["aggregates"] = aggregates;

    return doc.dump(2) + "\n";
}

AlignmentReport load_report_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("report is not valid JSON: " + std::string(e.what()));
    }
    AlignmentReport report;
    const auto& metadata = doc.at("metadata");
    report.tool_version = metadata.at("tool_version").get<std::string>();
    report.metrics.clear();
    for (const auto& name : metadata.at("metrics")) {
        report.metrics.push_back(metric_from_name(name.get<std::string>()));
    }
    report.k = metadata.at("k").get<int>();
    report.svcca.energy_threshold = metadata.at("svcca").at("energy_threshold").get<double>();
    report.svcca.ridge = metadata.at("svcca").at("ridge").get<double>();
    report.normalize.l2_before_knn = metadata.at("normalize").at("l2_before_knn").get<bool>();
    report.normalize.renormalize_after_fusion =
        metadata.at("normalize").at("renormalize_after_fusion").get<bool>();

    for (const auto& item : doc.at("scores")) {
        ScoreRow row;
        row.pair = item.at("pair").get<std::string>();
        if (!item.at("layer").is_null()) row.layer = item.at("layer").get<int>();
        row.score.metric = metric_from_name(item.at("metric").get<std::string>());
        row.score.value = item.at("value").get<double>();
        if (!item.at("k").is_null()) row.score.k = item.at("k").get<int>();
        row.score.degenerate = item.at("degenerate").get<bool>();
        report.scores.push_back(std::move(row));
    }
    for (const auto& item : doc.at("aggregates")) {
        AggregateRow row;
        row.pair = item.at("pair").get<std::string>();
        if (!item.at("layer").is_null()) row.layer = item.at("layer").get<int>();
        row.value = item.at("value").get<double>();
        report.aggregates.push_back(std::move(row));
    }
    return report;
}

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

const char* kPalette[] = {"#4c78a8", "#59a14f", "#e15759", "#f28e2b",
                          "#b07aa1", "#76b7b2", "#edc948", "#9c755f"};

}  // namespace

std::string emit_svg_bars(const AlignmentReport& report,
                          const std::vector<std::string>& pair_selection) {
    std::vector<std::string> pairs = pair_selection;
    if (pairs.empty()) {
        for (const AggregateRow& row : report.aggregates) {
            if (std::find(pairs.begin(), pairs.end(), row.pair) == pairs.end()) {
                pairs.push_back(row.pair);
            }
        }
    }
    if (pairs.empty()) {
        throw ConfigError("no aggregates to chart");
    }

    std::set<std::optional<int>, decltype(&layer_less)> layer_set(&layer_less);
    for (const AggregateRow& row : report.aggregates) {
        if (std::find(pairs.begin(), pairs.end(), row.pair) != pairs.end()) {
            layer_set.insert(row.layer);
        }
    }
    const std::vector<std::optional<int>> layers(layer_set.begin(), layer_set.end());
    if (layers.empty()) {
        throw ConfigError("selected pairs have no aggregates");
    }

    auto find_aggregate = [&](const std::string& pair,
                              const std::optional<int>& layer) -> double {
        for (const AggregateRow& row : report.aggregates) {
            if (row.pair == pair && row.layer == layer) return row.value;
        }
        throw ConfigError("missing aggregate for pair " + pair + " at layer " +
                          (layer ? std::to_string(*layer) : "none"));
    };

    const double bar_w = 18.0;
    const double bar_gap = 4.0;
    const double group_gap = 18.0;
    const double group_w =
        static_cast<double>(pairs.size()) * (bar_w + bar_gap) - bar_gap + group_gap;
    const double margin_left = 52.0;
    const double margin_top = 34.0;
    const double plot_h = 240.0;
    const double margin_bottom = 48.0 + 16.0 * static_cast<double>(pairs.size());
    const double width = margin_left + static_cast<double>(layers.size()) * group_w + 24.0;
    const double height = margin_top + plot_h + margin_bottom;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "  <style>text{font-family:sans-serif;font-size:11px;}"
        << ".axis{stroke:#333;stroke-width:1;}"
        << ".grid{stroke:#ddd;stroke-width:0.5;}</style>\n";
    svg << "  <text x=\"" << margin_left << "\" y=\"18\">Aggregate alignment score by layer"
        << "</text>\n";

    for (int tick = 0; tick <= 4; ++tick) {
        const double v = 0.25 * tick;
        const double y = margin_top + plot_h * (1.0 - v);
        svg << "  <line class=\"grid\" x1=\"" << margin_left << "\" y1=\"" << y << "\" x2=\""
            << (width - 12.0) << "\" y2=\"" << y << "\"/>\n";
        svg << "  <text x=\"" << (margin_left - 34.0) << "\" y=\"" << (y + 4.0) << "\">"
            << format_value(v) << "</text>\n";
    }
    svg << "  <line class=\"axis\" x1=\"" << margin_left << "\" y1=\"" << margin_top
        << "\" x2=\"" << margin_left << "\" y2=\"" << (margin_top + plot_h) << "\"/>\n";
    svg << "  <line class=\"axis\" x1=\"" << margin_left << "\" y1=\"" << (margin_top + plot_h)
        << "\" x2=\"" << (width - 12.0) << "\" y2=\"" << (margin_top + plot_h) << "\"/>\n";

    for (std::size_t g = 0; g < layers.size(); ++g) {
        const double group_x = margin_left + group_gap / 2.0 + static_cast<double>(g) * group_w;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const double value = find_aggregate(pairs[p], layers[g]);
            const double clamped = std::clamp(value, 0.0, 1.0);
            const double bh = plot_h * clamped;
            const double x = group_x + static_cast<double>(p) * (bar_w + bar_gap);
            const double y = margin_top + plot_h - bh;
            svg << "  <rect class=\"bar\" data-pair=\"" << escape_xml(pairs[p])
                << "\" data-layer=\""
                << (layers[g] ? std::to_string(*layers[g]) : std::string("none"))
                << "\" data-value=\"" << format_value(round_12(value)) << "\" x=\"" << x
                << "\" y=\"" << y << "\" width=\"" << bar_w << "\" height=\"" << bh
                << "\" fill=\"" << kPalette[p % 8] << "\"/>\n";
        }
        svg << "  <text x=\"" << (group_x + (group_w - group_gap) / 2.0 - 8.0) << "\" y=\""
            << (margin_top + plot_h + 16.0) << "\">"
            << (layers[g] ? std::to_string(*layers[g]) : std::string("-")) << "</text>\n";
    }

    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double y = margin_top + plot_h + 34.0 + 16.0 * static_cast<double>(p);
        svg << "  <rect x=\"" << margin_left << "\" y=\"" << (y - 9.0)
            << "\" width=\"10\" height=\"10\" fill=\"" << kPalette[p % 8] << "\"/>\n";
        svg << "  <text x=\"" << (margin_left + 16.0) << "\" y=\"" << y << "\">"
            << escape_xml(pairs[p]) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace align
