#pragma once

#include <cstddef>
#include <vector>

#include "align/matrix.hpp"

namespace align {

// N x N symmetric Gram matrix. `centered` records that the generating
// features were column-centered, which makes the kernel doubly centered
// (every row and column sums to zero up to rounding).
struct KernelMatrix {
    std::size_t n = 0;
    std::vector<double> values;  // row-major, symmetric
    bool centered = false;

    double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

// Linear kernel of the column-centered features: K = Xc * Xc^T. Symmetry is
// exact by construction (the lower triangle is mirrored).
KernelMatrix gram(const EmbeddingMatrix& x);

// tr(K * L) / (n - 1)^2 for centered kernels of equal size.
double hsic(const KernelMatrix& k, const KernelMatrix& l);

// Centered kernel alignment: hsic(Kx, Ky) / sqrt(hsic(Kx, Kx) * hsic(Ky, Ky)).
// Throws DegenerateInput when either self-HSIC is zero (constant embeddings).
AlignmentScore cka(const EmbeddingMatrix& x, const EmbeddingMatrix& y);
AlignmentScore cka_from_kernels(const KernelMatrix& kx, const KernelMatrix& ky);

// Feature-space formulation of the same quantity,
// ||Yc^T Xc||_F^2 / (||Xc^T Xc||_F * ||Yc^T Yc||_F); algebraically identical
// to cka for linear kernels and used as its cross-check oracle.
AlignmentScore cka_feature_form(const EmbeddingMatrix& x, const EmbeddingMatrix& y);

// CKA restricted to mutual top-k kernel-row neighborhoods: with centered
// Grams Kc, Lc and the mask a(i,j) = 1 iff i != j, j is a top-k neighbor of i
// in both kernels (ties broken toward the lower index), returns
//   sum a * Kc_ij * Lc_ij / sqrt(sum a * Kc_ij^2 * sum a * Lc_ij^2).
// An empty mask (or a zero denominator) yields value 0 with degenerate=true.
AlignmentScore cknna(const EmbeddingMatrix& x, const EmbeddingMatrix& y, int k);
AlignmentScore cknna_from_kernels(const KernelMatrix& kx, const KernelMatrix& ky, int k);

}  // namespace align
