#include "align/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "internal.hpp"

namespace align {

namespace {

void require_metric_sized(const EmbeddingMatrix& x) {
    if (x.n_samples() < 2) {
        throw ValidationError("metric requires n_samples >= 2");
    }
}

void require_compatible(const KernelMatrix& k, const KernelMatrix& l) {
    if (k.n != l.n) {
        throw ValidationError("kernel size mismatch (" + std::to_string(k.n) + " vs " +
                              std::to_string(l.n) + ")");
    }
    if (k.n < 2) {
        throw ValidationError("hsic requires n >= 2");
    }
    if (!k.centered || !l.centered) {
        throw ValidationError("hsic requires centered kernels");
    }
}

// Row-blocked pairwise sum of elementwise products of two symmetric
// matrices; O(n) scratch, deterministic.
double frobenius_inner(const KernelMatrix& k, const KernelMatrix& l) {
    const std::size_t n = k.n;
    std::vector<double> row_sums(n);
    std::vector<double> scratch(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* krow = k.values.data() + i * n;
        const double* lrow = l.values.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) scratch[j] = krow[j] * lrow[j];
        row_sums[i] = detail::pairwise_sum(scratch);
    }
    return detail::pairwise_sum(row_sums);
}

// Top-k column indices of one kernel row, self excluded; descending value,
// ties toward the lower index.
void top_k_row(const double* row, std::size_t n, std::size_t self, std::size_t k,
               std::vector<std::uint32_t>& scratch, std::uint8_t* mask_row) {
    scratch.clear();
    for (std::size_t j = 0; j < n; ++j) {
        if (j != self) scratch.push_back(static_cast<std::uint32_t>(j));
    }
    auto better = [row](std::uint32_t a, std::uint32_t b) {
        if (row[a] != row[b]) return row[a] > row[b];
        return a < b;
    };
    std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k),
                      scratch.end(), better);
    for (std::size_t t = 0; t < k; ++t) mask_row[scratch[t]] = 1;
}

}  // namespace

KernelMatrix gram(const EmbeddingMatrix& x) {
    require_metric_sized(x);
    const Eigen::MatrixXd xc = detail::centered_eigen(x);
    const std::size_t n = x.n_samples();

    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(xc.rows(), xc.rows());
    k.selfadjointView<Eigen::Lower>().rankUpdate(xc);

    KernelMatrix out;
    out.n = n;
    out.centered = true;
    out.values.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            out.values[i * n + j] = v;
            out.values[j * n + i] = v;
        }
    }
    return out;
}

double hsic(const KernelMatrix& k, const KernelMatrix& l) {
    require_compatible(k, l);
    const double denom = static_cast<double>(k.n - 1) * static_cast<double>(k.n - 1);
    return frobenius_inner(k, l) / denom;
}

AlignmentScore cka_from_kernels(const KernelMatrix& kx, const KernelMatrix& ky) {
    require_compatible(kx, ky);
    const double self_x = hsic(kx, kx);
    const double self_y = hsic(ky, ky);
    if (self_x <= 0.0 || self_y <= 0.0) {
        throw DegenerateInput("cka is undefined for constant embeddings (zero self-HSIC)");
    }
    const double value = hsic(kx, ky) / std::sqrt(self_x * self_y);
    return AlignmentScore{Metric::cka, value, std::nullopt, false};
}

AlignmentScore cka(const EmbeddingMatrix& x, const EmbeddingMatrix& y) {
    if (x.n_samples() != y.n_samples()) {
        throw ValidationError("cka: sample counts differ");
    }
    return cka_from_kernels(gram(x), gram(y));
}

AlignmentScore cka_feature_form(const EmbeddingMatrix& x, const EmbeddingMatrix& y) {
    if (x.n_samples() != y.n_samples()) {
        throw ValidationError("cka_feature_form: sample counts differ");
    }
    require_metric_sized(x);
    const Eigen::MatrixXd xc = detail::centered_eigen(x);
    const Eigen::MatrixXd yc = detail::centered_eigen(y);

    const Eigen::MatrixXd xtx = xc.transpose() * xc;
    const Eigen::MatrixXd yty = yc.transpose() * yc;
    const Eigen::MatrixXd ytx = yc.transpose() * xc;

    auto frob_sq = [](const Eigen::MatrixXd& m) {
        std::vector<double> sq(static_cast<std::size_t>(m.size()));
        const double* p = m.data();
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = p[i] * p[i];
        return detail::pairwise_sum(sq);
    };

    const double denom = std::sqrt(frob_sq(xtx)) * std::sqrt(frob_sq(yty));
    if (denom <= 0.0) {
        throw DegenerateInput("cka is undefined for constant embeddings (zero self-HSIC)");
    }
    return AlignmentScore{Metric::cka, frob_sq(ytx) / denom, std::nullopt, false};
}

AlignmentScore cknna_from_kernels(const KernelMatrix& kx, const KernelMatrix& ky, int k) {
    require_compatible(kx, ky);
    const std::size_t n = kx.n;
    if (k < 1 || static_cast<std::size_t>(k) > n - 1) {
        throw ValidationError("cknna: k must satisfy 1 <= k <= n-1");
    }
    const std::size_t kk = static_cast<std::size_t>(k);

    std::vector<std::uint8_t> mask_x(n * n, 0);
    std::vector<std::uint8_t> mask_y(n * n, 0);
    std::vector<std::uint32_t> scratch;
    scratch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        top_k_row(kx.values.data() + i * n, n, i, kk, scratch, mask_x.data() + i * n);
        top_k_row(ky.values.data() + i * n, n, i, kk, scratch, mask_y.data() + i * n);
    }

    std::vector<double> num_rows(n), dx_rows(n), dy_rows(n);
    std::vector<double> num_buf(n), dx_buf(n), dy_buf(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t count = 0;
        const double* krow = kx.values.data() + i * n;
        const double* lrow = ky.values.data() + i * n;
        const std::uint8_t* mx = mask_x.data() + i * n;
        const std::uint8_t* my = mask_y.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            if (mx[j] && my[j]) {
                num_buf[count] = krow[j] * lrow[j];
                dx_buf[count] = krow[j] * krow[j];
                dy_buf[count] = lrow[j] * lrow[j];
                ++count;
            }
        }
        if (count > 0) any = true;
        num_rows[i] = detail::pairwise_sum({num_buf.data(), count});
        dx_rows[i] = detail::pairwise_sum({dx_buf.data(), count});
        dy_rows[i] = detail::pairwise_sum({dy_buf.data(), count});
    }

    AlignmentScore score{Metric::cknna, 0.0, k, false};
    if (!any) {
        score.degenerate = true;
        return score;
    }
    const double dx = detail::pairwise_sum(dx_rows);
    const double dy = detail::pairwise_sum(dy_rows);
    if (dx <= 0.0 || dy <= 0.0) {
        score.degenerate = true;
        return score;
    }
    score.value = detail::pairwise_sum(num_rows) / std::sqrt(dx * dy);
    return score;
}

AlignmentScore cknna(const EmbeddingMatrix& x, const EmbeddingMatrix& y, int k) {
    if (x.n_samples() != y.n_samples()) {
        throw ValidationError("cknna: sample counts differ");
    }
    return cknna_from_kernels(gram(x), gram(y), k);
}

}  // namespace align
