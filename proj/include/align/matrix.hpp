#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "align/common.hpp"

namespace align {

// Row-aligned N x D matrix of per-sample representations for one
// (modality, layer) pair. Values are held as doubles in memory; the on-disk
// EMB1 format stores 32-bit floats (see emb_io.hpp).
//
// Construction validates shape and finiteness. A single-row matrix is a
// valid container (the EMB1 format allows it); metrics require n >= 2 and
// enforce that at call time.
class EmbeddingMatrix {
public:
    EmbeddingMatrix(std::size_t n_samples, std::size_t n_dims, std::vector<double> values,
                    Modality modality = Modality::text, std::optional<int> layer = std::nullopt);

    std::size_t n_samples() const { return n_samples_; }
    std::size_t n_dims() const { return n_dims_; }

    double at(std::size_t i, std::size_t j) const { return values_[i * n_dims_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * n_dims_, n_dims_};
    }

    const std::vector<double>& values() const { return values_; }

    Modality modality = Modality::text;
    std::optional<int> layer;

private:
    std::size_t n_samples_ = 0;
    std::size_t n_dims_ = 0;
    std::vector<double> values_;
};

// Variable-length token sequences for one batch of samples; all sequences
// share the trailing feature dimension. Input to the pooling operations.
struct TokenSequence {
    std::size_t n_tokens = 0;
    std::size_t dim = 0;
    std::vector<double> values;  // row-major n_tokens x dim
};

class TokenSequenceBatch {
public:
    explicit TokenSequenceBatch(std::vector<TokenSequence> sequences);

    std::size_t size() const { return sequences_.size(); }
    std::size_t dim() const { return dim_; }
    const TokenSequence& sequence(std::size_t i) const { return sequences_[i]; }

private:
    std::vector<TokenSequence> sequences_;
    std::size_t dim_ = 0;
};

}  // namespace align
