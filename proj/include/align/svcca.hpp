#pragma once

#include <vector>

#include "align/matrix.hpp"

namespace align {

struct SvccaConfig {
    // Fraction of squared-singular-value mass the SVD pruning retains.
    double energy_threshold = 0.99;
    // Diagonal regularizer added to both covariances before whitening.
    double ridge = 1e-8;
};

// Column-centers x, keeps the smallest r leading singular directions whose
// squared singular values reach energy_threshold of the total (within the
// numerical rank), and returns the N x r projections. Throws DegenerateInput
// when the centered matrix is rank zero (all rows equal).
EmbeddingMatrix svd_reduce(const EmbeddingMatrix& x, const SvccaConfig& cfg);

// Canonical correlations of the column-centered inputs, non-increasing and
// clamped to [0,1]. Whitening uses ridge-regularized covariances; a singular
// covariance with ridge == 0 raises NumericalError.
std::vector<double> cca_correlations(const EmbeddingMatrix& x, const EmbeddingMatrix& y,
                                     const SvccaConfig& cfg);

// svd_reduce both inputs, then the mean canonical correlation.
AlignmentScore svcca_score(const EmbeddingMatrix& x, const EmbeddingMatrix& y,
                           const SvccaConfig& cfg);

}  // namespace align
