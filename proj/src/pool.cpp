#include "align/pool.hpp"

#include <cmath>

namespace align {

EmbeddingMatrix mean_pool(const TokenSequenceBatch& batch, Modality modality,
                          std::optional<int> layer) {
    const std::size_t n = batch.size();
    const std::size_t d = batch.dim();
    std::vector<double> out(n * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const TokenSequence& seq = batch.sequence(i);
        for (std::size_t t = 0; t < seq.n_tokens; ++t) {
            for (std::size_t j = 0; j < d; ++j) {
                out[i * d + j] += seq.values[t * d + j];
            }
        }
        const double inv = 1.0 / static_cast<double>(seq.n_tokens);
        for (std::size_t j = 0; j < d; ++j) {
            out[i * d + j] *= inv;
        }
    }
    return EmbeddingMatrix(n, d, std::move(out), modality, layer);
}

EmbeddingMatrix last_token(const TokenSequenceBatch& batch, Modality modality,
                           std::optional<int> layer) {
    const std::size_t n = batch.size();
    const std::size_t d = batch.dim();
    std::vector<double> out(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        const TokenSequence& seq = batch.sequence(i);
        const double* last = seq.values.data() + (seq.n_tokens - 1) * d;
        for (std::size_t j = 0; j < d; ++j) {
            out[i * d + j] = last[j];
        }
    }
    return EmbeddingMatrix(n, d, std::move(out), modality, layer);
}

EmbeddingMatrix concat_fuse(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    if (a.n_samples() != b.n_samples()) {
        throw ValidationError("concat_fuse: sample counts differ (" +
                              std::to_string(a.n_samples()) + " vs " +
                              std::to_string(b.n_samples()) + ")");
    }
    const std::size_t n = a.n_samples();
    const std::size_t da = a.n_dims();
    const std::size_t db = b.n_dims();
    std::vector<double> out(n * (da + db));
    for (std::size_t i = 0; i < n; ++i) {
        double* dst = out.data() + i * (da + db);
        const auto ra = a.row(i);
        const auto rb = b.row(i);
        for (std::size_t j = 0; j < da; ++j) dst[j] = ra[j];
        for (std::size_t j = 0; j < db; ++j) dst[da + j] = rb[j];
    }
    return EmbeddingMatrix(n, da + db, std::move(out), Modality::fused, a.layer);
}

NormalizeResult l2_normalize_rows(const EmbeddingMatrix& m) {
    const std::size_t n = m.n_samples();
    const std::size_t d = m.n_dims();
    std::vector<double> out(n * d);
    std::size_t zero_rows = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = m.row(i);
        double sq = 0.0;
        for (double v : row) sq += v * v;
        if (sq == 0.0) {
            ++zero_rows;
            for (std::size_t j = 0; j < d; ++j) out[i * d + j] = 0.0;
            continue;
        }
        // Rows already at unit norm (up to summation rounding) pass through
        // untouched so the operation is exactly idempotent.
        if (std::abs(sq - 1.0) <= 1e-9) {
            for (std::size_t j = 0; j < d; ++j) out[i * d + j] = row[j];
            continue;
        }
        const double inv = 1.0 / std::sqrt(sq);
        for (std::size_t j = 0; j < d; ++j) out[i * d + j] = row[j] * inv;
    }
    return NormalizeResult{EmbeddingMatrix(n, d, std::move(out), m.modality, m.layer), zero_rows};
}

}  // namespace align
