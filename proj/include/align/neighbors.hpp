#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "align/matrix.hpp"

namespace align {

// Per-sample ordered top-k neighbor indices for one embedding space.
// Lists never contain the owning sample, hold exactly k distinct indices,
// and are ordered by descending similarity with ties broken toward the
// lower index.
class NeighborList {
public:
    NeighborList(std::size_t n, std::size_t k, std::vector<std::uint32_t> flat);

    std::size_t n() const { return n_; }
    std::size_t k() const { return k_; }

    std::span<const std::uint32_t> list(std::size_t i) const {
        return {flat_.data() + i * k_, k_};
    }

private:
    std::size_t n_ = 0;
    std::size_t k_ = 0;
    std::vector<std::uint32_t> flat_;  // n * k
};

// Exact k-nearest neighbors under cosine similarity of l2-normalized rows.
// Zero rows have similarity 0 to everything. `threads` only affects speed;
// the result is identical for any thread count.
NeighborList knn(const EmbeddingMatrix& x, std::size_t k, unsigned threads = 1);

// Same construction with raw inner-product similarity (no row normalization).
NeighborList knn_inner_product(const EmbeddingMatrix& x, std::size_t k, unsigned threads = 1);

// Mean per-sample overlap |set(a_i) ∩ set(b_i)| / k, in [0,1].
AlignmentScore mutual_knn(const NeighborList& a, const NeighborList& b);

// Fraction of samples i that return to themselves in two hops: i is reached
// from some j in b_i via a_j.
AlignmentScore cycle_knn(const NeighborList& a, const NeighborList& b);

// Mean longest-common-subsequence length of the ordered lists, in [0,k]
// (reported unnormalized).
AlignmentScore lcs_knn(const NeighborList& a, const NeighborList& b);

// Mean of 1 - Levenshtein(a_i, b_i)/k over index sequences, in [0,1].
AlignmentScore edit_knn(const NeighborList& a, const NeighborList& b);

}  // namespace align
