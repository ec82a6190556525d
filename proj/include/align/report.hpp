#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "align/common.hpp"
#include "align/svcca.hpp"

namespace align {

// One side of a comparison: a modality name or a fusion expression such as
// "vision+audio" (evaluated left to right with concat_fuse), plus the layer
// the representation comes from (absent for layer-less manifest entries).
struct SpaceSelector {
    std::string expression;
    std::optional<int> layer;

    std::string label() const;  // "vision+audio@3" or bare expression
};

struct PairSpec {
    SpaceSelector a;
    SpaceSelector b;

    // "exprA|exprB"; per-side layers are embedded only when they differ.
    std::string label() const;
    std::optional<int> common_layer() const;
};

struct NormalizationFlags {
    bool l2_before_knn = true;
    bool renormalize_after_fusion = false;
};

struct RunConfig {
    std::filesystem::path manifest_path;
    std::vector<PairSpec> pairs;  // fully expanded, no ranges
    std::vector<Metric> metrics;
    int k = 10;
    SvccaConfig svcca;
    NormalizationFlags normalize;
    unsigned threads = 1;
};

// Parses the run-config JSON:
//   {
//     "metrics": ["cka", ...],            // default: all seven
//     "k": 10,
//     "svcca": {"energy_threshold": 0.99, "ridge": 1e-8},
//     "normalize": {"l2_before_knn": true, "renormalize_after_fusion": false},
//     "pairs": [
//       {"a": "vision+audio", "b": "text", "layer": 3},
//       {"a": "vision", "b": "text", "layers": [0, 27]}   // inclusive range
//     ]
//   }
// A selector may also be an object {"space": ..., "layer": ...}; a pair-level
// "layer"/"layers" applies to both sides and cannot be combined with
// side-level layers.
RunConfig load_run_config(const std::filesystem::path& manifest_path,
                          const std::filesystem::path& config_path);
RunConfig parse_run_config(const std::filesystem::path& manifest_path,
                           const std::string& config_json);

struct ScoreRow {
    std::string pair;
    std::optional<int> layer;
    AlignmentScore score;
};

struct AggregateRow {
    std::string pair;
    std::optional<int> layer;
    double value = 0.0;
};

struct AlignmentReport {
    std::vector<ScoreRow> scores;
    std::vector<AggregateRow> aggregates;

    // Metadata stamped into every report so runs are reproducible.
    std::vector<Metric> metrics;
    int k = 10;
    SvccaConfig svcca;
    NormalizationFlags normalize;
    std::string tool_version{kToolVersion};
};

// Computes every requested metric for each (pair, layer) and the aggregate
// (arithmetic mean over the selected metrics with lcs_knn normalized by k).
// Deterministic for a fixed config and input, for any thread count.
AlignmentReport run_alignment(const RunConfig& cfg);

// CSV columns pair,layer,metric,value,k,degenerate; aggregates appear as
// metric "aggregate". Rows sorted by (pair, layer, metric); values rounded
// to 12 significant digits so repeated runs are byte-identical.
std::string emit_csv(const AlignmentReport& report);

// JSON mirror of the report: {"metadata", "scores", "aggregates"}, same
// ordering and rounding as the CSV.
std::string emit_json(const AlignmentReport& report);
AlignmentReport load_report_json(const std::string& json_text);

// Self-contained SVG grouped bar chart of aggregates: one group per layer,
// one bar per selected pair, y in [0,1]. An empty selection means every pair
// in the report. Bars carry data-pair/data-layer/data-value attributes.
std::string emit_svg_bars(const AlignmentReport& report,
                          const std::vector<std::string>& pair_selection = {});

}  // namespace align
