#include "align/matrix.hpp"

#include <cmath>

namespace align {

std::string_view modality_name(Modality m) {
    switch (m) {
        case Modality::text: return "text";
        case Modality::vision: return "vision";
        case Modality::audio: return "audio";
        case Modality::fused: return "fused";
    }
    return "text";
}

Modality modality_from_name(std::string_view name) {
    if (name == "text") return Modality::text;
    if (name == "vision") return Modality::vision;
    if (name == "audio") return Modality::audio;
    if (name == "fused") return Modality::fused;
    throw ValidationError("unknown modality: " + std::string(name));
}

std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::cka: return "cka";
        case Metric::cknna: return "cknna";
        case Metric::svcca: return "svcca";
        case Metric::cycle_knn: return "cycle_knn";
        case Metric::mutual_knn: return "mutual_knn";
        case Metric::lcs_knn: return "lcs_knn";
        case Metric::edit_knn: return "edit_knn";
    }
    return "cka";
}

Metric metric_from_name(std::string_view name) {
    for (Metric m : kAllMetrics) {
        if (metric_name(m) == name) return m;
    }
    throw ValidationError("unknown metric: " + std::string(name));
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t n_samples, std::size_t n_dims,
                                 std::vector<double> values, Modality modality_in,
                                 std::optional<int> layer_in)
    : modality(modality_in), layer(layer_in), n_samples_(n_samples), n_dims_(n_dims),
      values_(std::move(values)) {
    if (n_samples_ < 1 || n_dims_ < 1) {
        throw ValidationError("embedding matrix must have n_samples >= 1 and n_dims >= 1");
    }
    if (values_.size() != n_samples_ * n_dims_) {
        throw ValidationError("embedding matrix value count does not match shape");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw ValidationError("embedding matrix contains a non-finite value");
        }
    }
}

TokenSequenceBatch::TokenSequenceBatch(std::vector<TokenSequence> sequences)
    : sequences_(std::move(sequences)) {
    if (sequences_.empty()) {
        throw ValidationError("token batch is empty");
    }
    dim_ = sequences_.front().dim;
    if (dim_ < 1) {
        throw ValidationError("token batch dimension must be >= 1");
    }
    for (const TokenSequence& seq : sequences_) {
        if (seq.n_tokens < 1) {
            throw ValidationError("token batch contains an empty sequence");
        }
        if (seq.dim != dim_) {
            throw ValidationError("token batch sequences disagree on dimension");
        }
        if (seq.values.size() != seq.n_tokens * seq.dim) {
            throw ValidationError("token sequence value count does not match shape");
        }
        for (double v : seq.values) {
            if (!std::isfinite(v)) {
                throw ValidationError("token sequence contains a non-finite value");
            }
        }
    }
}

}  // namespace align
