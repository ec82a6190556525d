#pragma once

#include "align/matrix.hpp"

namespace align {

// Per-sample arithmetic mean over token vectors; output is N x D.
EmbeddingMatrix mean_pool(const TokenSequenceBatch& batch, Modality modality = Modality::text,
                          std::optional<int> layer = std::nullopt);

// Per-sample final token vector; output is N x D.
EmbeddingMatrix last_token(const TokenSequenceBatch& batch, Modality modality = Modality::text,
                           std::optional<int> layer = std::nullopt);

// Row-wise concatenation [a_i || b_i]; output is N x (Da + Db) with
// modality = fused. Sample counts must match.
EmbeddingMatrix concat_fuse(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

// Scales each nonzero row to unit Euclidean norm. Zero rows pass through
// unchanged and are counted in zero_rows rather than erroring, so metrics
// stay computable on dumps with padded rows.
struct NormalizeResult {
    EmbeddingMatrix matrix;
    std::size_t zero_rows = 0;
};
NormalizeResult l2_normalize_rows(const EmbeddingMatrix& m);

}  // namespace align
